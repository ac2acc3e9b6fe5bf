// tranet: data generation, training, evaluation, inspection and plotting for
// the number Translation / Transcription tasks.

#include <curl/curl.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tranet/tranet.hpp"

namespace fs = std::filesystem;
using namespace tranet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;

constexpr const char* kDefaultSemeionUrl =
    "https://archive.ics.uci.edu/ml/machine-learning-databases/semeion/semeion.data";

class UsageError : public Error {
 public:
  using Error::Error;
};

void print_config(const std::string& command, const ordered_json& cfg) {
  ordered_json j;
  j["command"] = command;
  j["config"] = cfg;
  std::cout << "config " << j.dump() << std::endl;
}

// ---------------------------------------------------------------------------
// Data directories

struct DatasetMeta {
  Task task = Task::Translation;
  std::uint64_t seed = 0;
};

void write_meta(const fs::path& dir, Task task, std::uint64_t seed, std::size_t train, std::size_t test) {
  ordered_json j;
  j["task"] = to_string(task);
  j["seed"] = seed;
  j["train"] = train;
  j["test"] = test;
  write_file_atomic(dir / "dataset.json", j.dump(2) + "\n");
}

DatasetMeta read_meta(const fs::path& dir) {
  std::string text;
  try {
    text = read_file(dir / "dataset.json");
  } catch (const Error& e) {
    throw DataError(DataError::Kind::Io, std::string(e.what()) + " (is --data a gen-data output directory?)");
  }
  try {
    const auto j = ordered_json::parse(text);
    return {task_from_string(j.at("task").get<std::string>()), j.at("seed").get<std::uint64_t>()};
  } catch (const std::exception& e) {
    throw DataError(DataError::Kind::Format, "bad dataset.json: " + std::string(e.what()));
  }
}

std::string read_data_file(const fs::path& p) {
  try {
    return read_file(p);
  } catch (const Error& e) {
    throw DataError(DataError::Kind::Io, e.what());
  }
}

TranslationSplit load_translation_dir(const fs::path& dir) {
  TranslationSplit s;
  s.train = parse_translation_tsv(read_data_file(dir / "train.tsv"), "train.tsv");
  s.test = parse_translation_tsv(read_data_file(dir / "test.tsv"), "test.tsv");
  return s;
}

TranscriptionSplit load_transcription_dir(const fs::path& dir) {
  TranscriptionSplit s;
  s.train = parse_transcription(read_data_file(dir / "train_images.bin"), read_data_file(dir / "train_index.tsv"),
                                "train");
  s.test =
      parse_transcription(read_data_file(dir / "test_images.bin"), read_data_file(dir / "test_index.tsv"), "test");
  return s;
}

std::string semeion_path_or_env(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("TRANET_SEMEION")) return env;
  return {};
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenDataArgs {
  std::string task = "translation";
  std::uint64_t seed = 1;
  std::string out;
  std::string semeion;
  std::size_t train_size = 100000;
  std::size_t test_size = 1000;
};

int cmd_gen_data(const GenDataArgs& a) {
  const Task task = task_from_string(a.task);
  const std::string semeion = semeion_path_or_env(a.semeion);
  print_config("gen-data", {{"task", a.task},
                            {"seed", a.seed},
                            {"out", a.out},
                            {"semeion", semeion},
                            {"train_size", a.train_size},
                            {"test_size", a.test_size}});
  const fs::path out(a.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError(DataError::Kind::Io, "cannot create output directory '" + a.out + "'");

  if (task == Task::Translation) {
    const auto split = gen_translation_dataset(a.seed);
    write_file_atomic(out / "train.tsv", format_translation_tsv(split.train));
    write_file_atomic(out / "test.tsv", format_translation_tsv(split.test));
    write_meta(out, task, a.seed, split.train.size(), split.test.size());
    std::cout << "train " << split.train.size() << "\ntest " << split.test.size() << "\n";
    return kExitOk;
  }
  if (semeion.empty())
    throw DataError(DataError::Kind::Io, "transcription needs the Semeion file (--semeion PATH or TRANET_SEMEION)");
  const auto records = parse_semeion(fs::path(semeion));
  const auto split = gen_transcription_dataset(records, a.seed, a.train_size, a.test_size);
  write_file_atomic(out / "train_images.bin", format_transcription_images(split.train));
  write_file_atomic(out / "train_index.tsv", format_transcription_index(split.train));
  write_file_atomic(out / "test_images.bin", format_transcription_images(split.test));
  write_file_atomic(out / "test_index.tsv", format_transcription_index(split.test));
  write_meta(out, task, a.seed, split.train.size(), split.test.size());
  std::cout << "train " << split.train.size() << "\ntest " << split.test.size() << "\n";
  return kExitOk;
}

struct FetchArgs {
  std::string out;
  std::string url;
  bool offline = false;
};

std::size_t curl_append(char* ptr, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(ptr, size * n);
  return size * n;
}

int cmd_fetch_semeion(const FetchArgs& a) {
  std::string url = a.url;
  if (url.empty()) {
    const char* env = std::getenv("TRANET_SEMEION_URL");
    url = env ? env : kDefaultSemeionUrl;
  }
  print_config("fetch-semeion", {{"out", a.out}, {"url", url}, {"offline", a.offline}});
  if (a.offline) throw DataError(DataError::Kind::Io, "--offline forbids downloading " + url);

  std::string body;
  CURL* curl = curl_easy_init();
  if (!curl) throw DataError(DataError::Kind::Io, "cannot initialise libcurl");
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, curl_append);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK)
    throw DataError(DataError::Kind::Io, "download of " + url + " failed: " + curl_easy_strerror(rc));

  std::istringstream in(body);
  const auto records = parse_semeion(in);
  if (records.size() != kSemeionRecords)
    throw DataError(DataError::Kind::BadRecordCount,
                    "downloaded file has " + std::to_string(records.size()) + " records, expected 1593");
  write_file_atomic(a.out, body);
  std::cout << "records " << records.size() << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string task = "translation";
  std::string mode = "encouraged";
  std::uint64_t seed = 1;
  int epochs = 100;
  int batch = 32;
  double lr = 0.001;
  std::string data;
  std::string out_model;
  std::string out_report;
};

void log_epoch(const EpochMetrics& m) {
  std::cerr << to_string(m.phase) << " epoch " << m.epoch << " loss " << std::setprecision(6) << m.loss << std::endl;
}

int cmd_train(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.task = task_from_string(a.task);
  cfg.mode = mode_from_string(a.mode);
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.adam.learning_rate = a.lr;
  cfg.preset = Preset::Custom;
  print_config("train", {{"task", a.task},
                         {"mode", a.mode},
                         {"seed", a.seed},
                         {"epochs", a.epochs},
                         {"batch", a.batch},
                         {"lr", a.lr},
                         {"beta1", cfg.adam.beta1},
                         {"beta2", cfg.adam.beta2},
                         {"epsilon", cfg.adam.epsilon},
                         {"data", a.data},
                         {"out_model", a.out_model},
                         {"out_report", a.out_report}});
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto meta = read_meta(a.data);
  if (meta.task != cfg.task)
    throw DataError(DataError::Kind::Format, "--data holds a " + std::string(to_string(meta.task)) +
                                                 " dataset but --task is " + a.task);

  RngStream init = RngStream(cfg.seed).split(kInitTag);
  TraNet net = build_tranet(cfg.task, init);
  TrainHooks hooks{log_epoch};
  RepeatResult result;
  result.seed = cfg.seed;
  auto run = [&](const auto& split) {
    result.history = cfg.mode == Mode::Conventional
                         ? train_conventional(net, end_to_end_set(split), cfg, hooks)
                         : train_encouraged(net, encoder_set(split), decoder_set(split), cfg, hooks);
    result.eval = evaluate(net, eval_set(split));
  };
  if (cfg.task == Task::Translation)
    run(load_translation_dir(a.data));
  else
    run(load_transcription_dir(a.data));

  save_checkpoint(net, a.out_model);
  ExperimentReport report;
  report.task = cfg.task;
  report.mode = cfg.mode;
  report.preset = cfg.preset;
  report.epochs = cfg.epochs;
  report.batch_size = cfg.batch_size;
  report.adam = cfg.adam;
  report.seeds = {cfg.seed};
  report.repeats = {result};
  aggregate(report);
  if (!a.out_report.empty()) write_file_atomic(a.out_report, report_to_string(report));
  std::cout << "exact_match " << result.eval.exact_match << "\nchar_accuracy " << result.eval.char_accuracy
            << "\nmean_levenshtein " << result.eval.mean_levenshtein << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string out_report;
};

int cmd_eval(const EvalArgs& a) {
  print_config("eval", {{"model", a.model}, {"data", a.data}, {"out_report", a.out_report}});
  const TraNet net = load_checkpoint(a.model);
  const auto meta = read_meta(a.data);
  if (meta.task != net.task())
    throw CheckpointError(CheckpointError::Kind::DimensionMismatch,
                          "model expects " + std::to_string(input_size(net.task())) + " inputs (" +
                              std::string(to_string(net.task())) + ") but --data holds " +
                              std::string(to_string(meta.task)) + " examples with " +
                              std::to_string(input_size(meta.task)) + " inputs");
  const EvalSet test = meta.task == Task::Translation ? eval_set(load_translation_dir(a.data))
                                                      : eval_set(load_transcription_dir(a.data));
  const auto m = evaluate(net, test);
  ordered_json j;
  j["task"] = to_string(net.task());
  j["model"] = a.model;
  j["data"] = a.data;
  j["eval"] = to_json(m);
  if (!a.out_report.empty()) write_file_atomic(a.out_report, j.dump(2) + "\n");
  std::cout << j["eval"].dump(2) << "\n";
  return kExitOk;
}

struct DemoArgs {
  std::string model;
  std::string input;
  std::string image;
  int expect = -1;
};

void print_inspection(const RepresentationReport& rep, std::optional<int> n_true) {
  std::cout << "bottleneck (rows: digit position, columns: digit 0-9)\n";
  for (std::size_t k = 0; k < kDigitSlots; ++k) {
    std::cout << "  pos " << k << ":";
    for (std::size_t d = 0; d < 10; ++d)
      std::cout << ' ' << std::fixed << std::setprecision(3) << rep.activations[k * 10 + d];
    std::cout << "  -> " << rep.digits[k] << "\n";
  }
  std::cout << "argmax digits " << rep.digits[0] << rep.digits[1] << rep.digits[2] << rep.digits[3] << "\n";
  if (n_true) {
    std::cout << "true digits   " << rep.true_digits[0] << rep.true_digits[1] << rep.true_digits[2]
              << rep.true_digits[3] << "\n";
    std::cout << "linf distance " << std::setprecision(4) << rep.linf_distance << "\n";
    std::cout << "digits match  " << (rep.digits_match() ? "yes" : "no") << "\n";
  }
}

int cmd_demo(const DemoArgs& a) {
  print_config("demo", {{"model", a.model}, {"input", a.input}, {"image", a.image}, {"expect", a.expect}});
  if (a.input.empty() == a.image.empty()) throw UsageError("demo needs exactly one of --input or --image");
  const TraNet net = load_checkpoint(a.model);
  std::vector<float> x;
  std::optional<int> n_true;
  if (a.expect >= 0) n_true = a.expect;
  if (!a.input.empty()) {
    if (net.task() != Task::Translation)
      throw CheckpointError(CheckpointError::Kind::DimensionMismatch, "--input needs a translation model");
    x.resize(kLetterCodeSize);
    encode_text_into<float>(a.input, x);
    if (!n_true) {
      try {
        n_true = parse_english(a.input);
      } catch (const ParseError&) {
      }
    }
  } else {
    if (net.task() != Task::Transcription)
      throw CheckpointError(CheckpointError::Kind::DimensionMismatch, "--image needs a transcription model");
    const std::string bytes = read_data_file(a.image);
    std::vector<std::uint8_t> pixels;
    if (bytes.size() == kCompositePixels)
      pixels.assign(bytes.begin(), bytes.end());
    else
      pixels = parse_pgm(bytes);
    x.assign(pixels.begin(), pixels.end());
  }
  Matrix<float> xb(1, x.size());
  std::copy(x.begin(), x.end(), xb.flat().begin());
  const std::string output = decode_text<float>(net.forward(xb).row(0));
  std::cout << "output \"" << output << "\"\n";
  const auto rep = inspect_representation(net, x, n_true.value_or(0));
  print_inspection(rep, n_true);
  return kExitOk;
}

struct ExperimentArgs {
  std::string task = "translation";
  std::string mode = "encouraged";
  std::string preset = "smoke";
  std::uint64_t seed = 1;
  std::string out;
  std::string semeion;
  int epochs = 0;
  int repeats = 0;
  bool quiet = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  ExperimentOptions opt;
  opt.task = task_from_string(a.task);
  opt.mode = mode_from_string(a.mode);
  opt.preset = preset_from_string(a.preset);
  opt.seed = a.seed;
  if (a.epochs > 0) opt.epochs_override = a.epochs;
  if (a.repeats > 0) opt.repeats_override = a.repeats;
  const auto spec = preset_spec(opt.task, opt.preset);
  const std::string semeion = semeion_path_or_env(a.semeion);
  print_config("experiment", {{"task", a.task},
                              {"mode", a.mode},
                              {"preset", a.preset},
                              {"seed", a.seed},
                              {"epochs", opt.epochs_override.value_or(spec.epochs)},
                              {"repeats", opt.repeats_override.value_or(spec.repeats)},
                              {"batch", opt.batch_size},
                              {"lr", opt.adam.learning_rate},
                              {"semeion", semeion},
                              {"out", a.out}});
  std::vector<SemeionRecord> records;
  if (opt.task == Task::Transcription) {
    if (semeion.empty())
      throw DataError(DataError::Kind::Io, "transcription needs the Semeion file (--semeion PATH or TRANET_SEMEION)");
    records = parse_semeion(fs::path(semeion));
    opt.semeion = &records;
  }
  if (!a.quiet)
    opt.on_epoch = [](int r, const EpochMetrics& m) {
      std::cerr << "repeat " << r << ' ';
      log_epoch(m);
    };
  opt.on_repeat = [](int r, const RepeatResult& res) {
    std::cerr << "repeat " << r << " seed " << res.seed << " exact_match " << res.eval.exact_match
              << " char_accuracy " << res.eval.char_accuracy << std::endl;
  };
  const auto report = run_experiment(opt);
  write_file_atomic(a.out, report_to_string(report));
  std::cout << "mean_exact " << report.mean_exact << "\nstd_exact " << report.std_exact << "\n";
  return kExitOk;
}

struct PlotArgs {
  std::string report;
  std::string dump_image;
  std::size_t index = 0;
  std::string out;
};

int cmd_plot(const PlotArgs& a) {
  print_config("plot", {{"report", a.report}, {"dump_image", a.dump_image}, {"index", a.index}, {"out", a.out}});
  if (a.report.empty() == a.dump_image.empty()) throw UsageError("plot needs exactly one of --report or --dump-image");
  if (!a.report.empty()) {
    const auto report = report_from_string(read_data_file(a.report));
    write_file_atomic(a.out, loss_curves_svg(report));
    return kExitOk;
  }
  const std::string bytes = read_data_file(a.dump_image);
  if (bytes.size() < (a.index + 1) * kCompositePixels)
    throw DataError(DataError::Kind::Format, "image index " + std::to_string(a.index) + " is past the end of " +
                                                 a.dump_image);
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data()) + a.index * kCompositePixels;
  write_file_atomic(a.out, composite_pgm(std::span<const std::uint8_t>(p, kCompositePixels)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoder-decoder number Translation/Transcription experiments"};
  app.require_subcommand(1);
  const std::vector<std::string> tasks = {"translation", "transcription"};
  const std::vector<std::string> modes = {"conventional", "encouraged"};

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a Translation or Transcription dataset");
  gen_cmd->add_option("--task", gen.task)->check(CLI::IsMember(tasks))->required();
  gen_cmd->add_option("--seed", gen.seed, "Split seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--semeion", gen.semeion, "Semeion data file (transcription)");
  gen_cmd->add_option("--train-size", gen.train_size)->capture_default_str();
  gen_cmd->add_option("--test-size", gen.test_size)->capture_default_str();

  FetchArgs fetch;
  auto* fetch_cmd = app.add_subcommand("fetch-semeion", "Download and validate the Semeion digit file");
  fetch_cmd->add_option("--out", fetch.out)->required();
  fetch_cmd->add_option("--url", fetch.url, "Source URL (default: $TRANET_SEMEION_URL or the UCI archive)");
  fetch_cmd->add_flag("--offline", fetch.offline, "Refuse network access");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one TraNet and write a checkpoint and report");
  train_cmd->add_option("--task", train.task)->check(CLI::IsMember(tasks))->required();
  train_cmd->add_option("--mode", train.mode)->check(CLI::IsMember(modes))->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--batch", train.batch)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--lr", train.lr)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--data", train.data, "gen-data output directory")->required();
  train_cmd->add_option("--out-model", train.out_model)->required();
  train_cmd->add_option("--out-report", train.out_report);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset's test split");
  eval_cmd->add_option("--model", ev.model)->required();
  eval_cmd->add_option("--data", ev.data)->required();
  eval_cmd->add_option("--out-report", ev.out_report);

  DemoArgs demo;
  auto* demo_cmd = app.add_subcommand("demo", "Run one input and show the bottleneck digits");
  demo_cmd->add_option("--model", demo.model)->required();
  demo_cmd->add_option("--input", demo.input, "English number words (translation model)");
  demo_cmd->add_option("--image", demo.image, "64x16 PGM or raw 1024-byte image (transcription model)");
  demo_cmd->add_option("--expect", demo.expect, "True number for the distance column")->check(CLI::Range(0, 9999));

  ExperimentArgs ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Run the repeated-seed protocol and write a report");
  ex_cmd->add_option("--task", ex.task)->check(CLI::IsMember(tasks))->required();
  ex_cmd->add_option("--mode", ex.mode)->check(CLI::IsMember(modes))->required();
  ex_cmd->add_option("--preset", ex.preset)->check(CLI::IsMember({"full", "smoke"}))->capture_default_str();
  ex_cmd->add_option("--seed", ex.seed, "Seed of the first repeat")->capture_default_str();
  ex_cmd->add_option("--out", ex.out, "Report JSON path")->required();
  ex_cmd->add_option("--semeion", ex.semeion, "Semeion data file (transcription)");
  ex_cmd->add_option("--epochs", ex.epochs, "Override the preset's epochs per phase")->check(CLI::PositiveNumber);
  ex_cmd->add_option("--repeats", ex.repeats, "Override the preset's repeat count")->check(CLI::PositiveNumber);
  ex_cmd->add_flag("--quiet", ex.quiet, "Only log per-repeat results");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Loss curves as SVG, or a composite image as PGM");
  plot_cmd->add_option("--report", plot.report, "Report JSON");
  plot_cmd->add_option("--dump-image", plot.dump_image, "Transcription *_images.bin file");
  plot_cmd->add_option("--index", plot.index, "Image index for --dump-image")->capture_default_str();
  plot_cmd->add_option("--out", plot.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen);
    if (*fetch_cmd) return cmd_fetch_semeion(fetch);
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd) return cmd_eval(ev);
    if (*demo_cmd) return cmd_demo(demo);
    if (*ex_cmd) return cmd_experiment(ex);
    if (*plot_cmd) return cmd_plot(plot);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonFiniteLoss& e) {
    std::cerr << "training failed: " << e.what() << "\n";
    return kExitTraining;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
