#pragma once

// Conventional (end-to-end) and encouraged (encoder, then decoder) training of
// TraNet, evaluation by exact string match, and the repeated-seed experiment
// protocol.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tranet/adam.hpp"
#include "tranet/datasets.hpp"
#include "tranet/encoding.hpp"
#include "tranet/model.hpp"
#include "tranet/nn.hpp"
#include "tranet/rng.hpp"

namespace tranet {

enum class Mode { Conventional, Encouraged };
enum class Phase { End2End, Encoder, Decoder };
enum class Preset { Full, Smoke, Custom };

inline std::string_view to_string(Mode m) { return m == Mode::Conventional ? "conventional" : "encouraged"; }
inline std::string_view to_string(Preset p) {
  return p == Preset::Full ? "full" : (p == Preset::Smoke ? "smoke" : "custom");
}
inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::End2End: return "end2end";
    case Phase::Encoder: return "encoder";
    case Phase::Decoder: return "decoder";
  }
  return "";
}

inline Mode mode_from_string(std::string_view s) {
  if (s == "conventional") return Mode::Conventional;
  if (s == "encouraged") return Mode::Encouraged;
  throw Error("unknown mode '" + std::string(s) + "' (expected conventional or encouraged)");
}
inline Preset preset_from_string(std::string_view s) {
  if (s == "full") return Preset::Full;
  if (s == "smoke") return Preset::Smoke;
  if (s == "custom") return Preset::Custom;
  throw Error("unknown preset '" + std::string(s) + "' (expected full, smoke or custom)");
}
inline Phase phase_from_string(std::string_view s) {
  if (s == "end2end") return Phase::End2End;
  if (s == "encoder") return Phase::Encoder;
  if (s == "decoder") return Phase::Decoder;
  throw Error("unknown phase '" + std::string(s) + "'");
}

struct TrainConfig {
  Task task = Task::Translation;
  Mode mode = Mode::Encouraged;
  int epochs = 100;
  int batch_size = 32;
  std::uint64_t seed = 1;
  AdamConfig adam;
  Preset preset = Preset::Full;

  void validate() const {
    if (epochs < 1) throw Error("epochs must be >= 1");
    if (batch_size < 1) throw Error("batch size must be >= 1");
  }
};

struct EpochMetrics {
  Phase phase = Phase::End2End;
  int epoch = 0;  // 1-based
  double loss = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

using TrainHistory = std::vector<EpochMetrics>;

struct TrainHooks {
  std::function<void(const EpochMetrics&)> on_epoch;
};

/// Supervised pairs of binary vectors, stored compactly as bytes.
struct BinarySet {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> y;

  BinarySet() = default;
  BinarySet(std::size_t in, std::size_t out) : in_dim(in), out_dim(out) {}

  std::size_t rows() const { return in_dim ? x.size() / in_dim : 0; }
  std::span<const std::uint8_t> input(std::size_t i) const { return {x.data() + i * in_dim, in_dim}; }
  std::span<const std::uint8_t> target(std::size_t i) const { return {y.data() + i * out_dim, out_dim}; }

  void add(std::span<const std::uint8_t> in, std::span<const std::uint8_t> out) {
    check_shape(in.size() == in_dim && out.size() == out_dim, "BinarySet::add: row width mismatch");
    x.insert(x.end(), in.begin(), in.end());
    y.insert(y.end(), out.begin(), out.end());
  }
};

/// Held-out inputs with the strings the network should produce.
struct EvalSet {
  std::size_t in_dim = 0;
  std::vector<std::uint8_t> x;
  std::vector<std::string> targets;
  std::vector<int> numbers;

  std::size_t rows() const { return targets.size(); }
  std::span<const std::uint8_t> input(std::size_t i) const { return {x.data() + i * in_dim, in_dim}; }
};

// ---------------------------------------------------------------------------
// Task data

inline BinarySet end_to_end_set(const TranslationSplit& s) {
  BinarySet set(kLetterCodeSize, kLetterCodeSize);
  for (const auto& p : s.train) set.add(encode_text(p.source), encode_text(p.target));
  return set;
}

inline BinarySet encoder_set(const TranslationSplit& s) {
  BinarySet set(kLetterCodeSize, kDigitCodeSize);
  for (const auto& p : s.train) set.add(encode_text(p.source), encode_digits(p.n));
  return set;
}

/// Only training numbers, so no test target string is ever seen.
inline BinarySet decoder_set(const TranslationSplit& s) {
  BinarySet set(kDigitCodeSize, kLetterCodeSize);
  for (const auto& p : s.train) set.add(encode_digits(p.n), encode_text(p.target));
  return set;
}

inline EvalSet eval_set(const TranslationSplit& s) {
  EvalSet set{kLetterCodeSize, {}, {}, {}};
  for (const auto& p : s.test) {
    const auto code = encode_text(p.source);
    set.x.insert(set.x.end(), code.begin(), code.end());
    set.targets.push_back(p.target);
    set.numbers.push_back(p.n);
  }
  return set;
}

inline BinarySet end_to_end_set(const TranscriptionSplit& s) {
  BinarySet set(kCompositePixels, kLetterCodeSize);
  for (const auto& ex : s.train) set.add(ex.image, encode_text(ex.label_text));
  return set;
}

inline BinarySet encoder_set(const TranscriptionSplit& s) {
  BinarySet set(kCompositePixels, kDigitCodeSize);
  for (const auto& ex : s.train) set.add(ex.image, encode_digits(ex.n));
  return set;
}

/// Every value 0..9999: the split is by digit image, not by number.
inline BinarySet decoder_set(const TranscriptionSplit&) {
  BinarySet set(kDigitCodeSize, kLetterCodeSize);
  for (int n = 0; n <= kMaxNumber; ++n) set.add(encode_digits(n), encode_text(to_english(n)));
  return set;
}

inline EvalSet eval_set(const TranscriptionSplit& s) {
  EvalSet set{kCompositePixels, {}, {}, {}};
  for (const auto& ex : s.test) {
    set.x.insert(set.x.end(), ex.image.begin(), ex.image.end());
    set.targets.push_back(ex.label_text);
    set.numbers.push_back(ex.n);
  }
  return set;
}

/// Test numbers and train numbers partition 0..9999.
inline bool translation_split_ok(const TranslationSplit& s) {
  std::vector<int> seen(kMaxNumber + 1, 0);
  for (const auto& p : s.train) ++seen[p.n];
  for (const auto& p : s.test) ++seen[p.n];
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

/// No Semeion record feeds both a training and a test composite.
inline bool transcription_split_ok(const TranscriptionSplit& s) {
  std::vector<char> in_train(kSemeionRecords, 0);
  for (const auto& ex : s.train)
    for (int i : ex.source_indices) in_train[static_cast<std::size_t>(i)] = 1;
  for (const auto& ex : s.test)
    for (int i : ex.source_indices)
      if (in_train[static_cast<std::size_t>(i)]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Training

namespace detail {

template <typename T>
void load_rows(std::span<const std::uint8_t> src, std::size_t width, std::span<const std::size_t> rows,
               Matrix<T>& out) {
  out.resize(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto* p = src.data() + rows[r] * width;
    auto dst = out.row(r);
    for (std::size_t c = 0; c < width; ++c) dst[c] = static_cast<T>(p[c]);
  }
}

inline std::vector<std::size_t> param_sizes(std::span<const DenseLayer<float>> layers) {
  std::vector<std::size_t> sizes;
  for (const auto& l : layers) {
    sizes.push_back(l.weights.size());
    sizes.push_back(l.bias.size());
  }
  return sizes;
}

inline constexpr std::uint64_t kShuffleTag[] = {0x6532650000000001ULL, 0x656E630000000002ULL,
                                                0x6465630000000003ULL};

}  // namespace detail

/// Minimizes bce_loss over a contiguous layer range with ADAM.
///
/// Each epoch visits the rows in a fresh order drawn from `shuffle`; exactly
/// epochs * ceil(N / batch) optimizer steps are taken. Reported epoch loss is
/// the row-weighted mean of the batch losses seen during that epoch.
inline TrainHistory train_layers(std::span<DenseLayer<float>> layers, const BinarySet& data,
                                 const TrainConfig& cfg, Phase phase, RngStream shuffle,
                                 const TrainHooks& hooks = {}) {
  cfg.validate();
  const FlushDenormals ftz;  // covers backward passes and ADAM updates as well
  check_shape(!layers.empty() && layers.front().fan_in() == data.in_dim && layers.back().fan_out() == data.out_dim,
              "train: data dimensions do not match the layer range");
  const std::size_t n = data.rows();
  if (n == 0) throw Error("train: empty training set");

  const auto sizes = detail::param_sizes(layers);
  AdamState<float> adam(cfg.adam, sizes);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  ForwardCache<float> cache;
  std::vector<LayerGrads<float>> grads;
  Matrix<float> xb, yb;
  std::vector<std::span<float>> params;
  std::vector<std::span<const float>> grad_views;
  const std::span<const DenseLayer<float>> const_layers(layers.data(), layers.size());
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  TrainHistory history;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const auto rows = std::span<const std::size_t>(order).subspan(start, std::min(batch, n - start));
      detail::load_rows(std::span<const std::uint8_t>(data.x), data.in_dim, rows, xb);
      detail::load_rows(std::span<const std::uint8_t>(data.y), data.out_dim, rows, yb);
      forward_layers(const_layers, xb, cache);
      const double loss = bce_loss(cache.output(), yb);
      if (!std::isfinite(loss))
        throw NonFiniteLoss("non-finite loss in " + std::string(to_string(phase)) + " phase, epoch " +
                            std::to_string(epoch) + ", batch starting at row " + std::to_string(start));
      loss_sum += loss * static_cast<double>(rows.size());
      backward_layers(const_layers, cache, yb, grads);

      params.clear();
      grad_views.clear();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        params.emplace_back(layers[l].weights.flat());
        params.emplace_back(layers[l].bias);
        grad_views.emplace_back(grads[l].weights.flat());
        grad_views.emplace_back(grads[l].bias);
      }
      adam.step(params, grad_views);
    }
    const EpochMetrics m{phase, epoch, loss_sum / static_cast<double>(n)};
    if (!std::isfinite(m.loss) || m.loss < 0.0)
      throw NonFiniteLoss("invalid epoch loss in " + std::string(to_string(phase)) + " phase, epoch " +
                          std::to_string(epoch));
    history.push_back(m);
    if (hooks.on_epoch) hooks.on_epoch(m);
  }
  return history;
}

inline TrainHistory train_conventional(TraNet& net, const BinarySet& data, const TrainConfig& cfg,
                                       const TrainHooks& hooks = {}) {
  return train_layers(net.layers(), data, cfg, Phase::End2End, RngStream(cfg.seed).split(detail::kShuffleTag[0]),
                      hooks);
}

/// Phase A fits the encoder to digit codes; phase B fits the decoder from
/// digit codes to letter codes. Each phase runs cfg.epochs epochs and touches
/// only its own layers. The returned network is used as composed, with no
/// rounding of the bottleneck.
inline TrainHistory train_encouraged(TraNet& net, const BinarySet& encoder_data, const BinarySet& decoder_data,
                                     const TrainConfig& cfg, const TrainHooks& hooks = {}) {
  const RngStream root(cfg.seed);
  auto history = train_layers(net.encoder(), encoder_data, cfg, Phase::Encoder, root.split(detail::kShuffleTag[1]),
                              hooks);
  auto decoder_history =
      train_layers(net.decoder(), decoder_data, cfg, Phase::Decoder, root.split(detail::kShuffleTag[2]), hooks);
  history.insert(history.end(), decoder_history.begin(), decoder_history.end());
  return history;
}

// ---------------------------------------------------------------------------
// Evaluation

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct EvalMetrics {
  double exact_match = 0.0;
  double char_accuracy = 0.0;
  double mean_levenshtein = 0.0;
  std::size_t n_test = 0;
  /// Exact-match rate when the bottleneck is rounded to its per-block argmax digit code.
  double exact_match_snapped = 0.0;

  bool operator==(const EvalMetrics&) const = default;
};

struct Prediction {
  std::string text;
  std::array<std::uint8_t, kTextSlots> slots{};
};

inline std::vector<Prediction> decode_outputs(const Matrix<float>& out) {
  std::vector<Prediction> preds(out.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    preds[r].slots = decode_slots<float>(out.row(r));
    preds[r].text = decode_text<float>(out.row(r));
  }
  return preds;
}

/// Composed forward pass on rows of `x` in chunks.
inline Matrix<float> predict(const TraNet& net, std::span<const std::uint8_t> x, std::size_t in_dim,
                             std::size_t begin, std::size_t end) {
  std::vector<std::size_t> rows(end - begin);
  std::iota(rows.begin(), rows.end(), begin);
  Matrix<float> xb;
  detail::load_rows(x, in_dim, rows, xb);
  return net.forward(xb);
}

inline Matrix<float> snap_to_digit_codes(const Matrix<float>& bottleneck) {
  Matrix<float> snapped(bottleneck.rows(), kDigitCodeSize);
  for (std::size_t r = 0; r < bottleneck.rows(); ++r)
    encode_digits_into<float>(decode_digits<float>(bottleneck.row(r)), snapped.row(r));
  return snapped;
}

inline EvalMetrics evaluate(const TraNet& net, const EvalSet& test) {
  check_shape(test.in_dim == input_size(net.task()),
              "evaluate: test inputs have " + std::to_string(test.in_dim) + " values, the " +
                  std::string(to_string(net.task())) + " model expects " + std::to_string(input_size(net.task())));
  EvalMetrics m;
  m.n_test = test.rows();
  if (m.n_test == 0) return m;
  constexpr std::size_t kChunk = 256;
  std::size_t exact = 0, exact_snapped = 0, slot_hits = 0, edits = 0;
  for (std::size_t begin = 0; begin < m.n_test; begin += kChunk) {
    const std::size_t end = std::min(m.n_test, begin + kChunk);
    std::vector<std::size_t> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    Matrix<float> xb;
    detail::load_rows(std::span<const std::uint8_t>(test.x), test.in_dim, rows, xb);
    const Matrix<float> code = net.encode(xb);
    const auto preds = decode_outputs(net.decode(code));
    const auto snapped = decode_outputs(net.decode(snap_to_digit_codes(code)));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& target = test.targets[begin + r];
      const auto target_code = encode_text(target);
      const auto target_slots = decode_slots<std::uint8_t>(target_code);
      exact += preds[r].text == target;
      exact_snapped += snapped[r].text == target;
      for (std::size_t s = 0; s < kTextSlots; ++s) slot_hits += preds[r].slots[s] == target_slots[s];
      edits += levenshtein(preds[r].text, target);
    }
  }
  const double n = static_cast<double>(m.n_test);
  m.exact_match = static_cast<double>(exact) / n;
  m.exact_match_snapped = static_cast<double>(exact_snapped) / n;
  m.char_accuracy = static_cast<double>(slot_hits) / (n * static_cast<double>(kTextSlots));
  m.mean_levenshtein = static_cast<double>(edits) / n;
  return m;
}

// ---------------------------------------------------------------------------
// Bottleneck inspection

struct RepresentationReport {
  std::array<float, kDigitCodeSize> activations{};
  std::array<int, kDigitSlots> digits{};
  std::array<int, kDigitSlots> true_digits{};
  double linf_distance = 0.0;  // to the exact digit code of the true number

  bool digits_match() const { return digits == true_digits; }
};

inline RepresentationReport inspect_code(std::span<const float> code, int n_true) {
  check_shape(code.size() == kDigitCodeSize, "inspect: bottleneck must have 40 values");
  RepresentationReport rep;
  std::copy(code.begin(), code.end(), rep.activations.begin());
  rep.digits = decode_digit_blocks(code);
  const auto truth = encode_digits(n_true);
  rep.true_digits = decode_digit_blocks<std::uint8_t>(truth);
  for (std::size_t i = 0; i < kDigitCodeSize; ++i)
    rep.linf_distance = std::max(rep.linf_distance, std::abs(static_cast<double>(code[i]) - truth[i]));
  return rep;
}

/// Bottleneck activations for one input compared with the digit code of `n_true`.
inline RepresentationReport inspect_representation(const TraNet& net, std::span<const float> x, int n_true) {
  check_shape(x.size() == input_size(net.task()), "inspect: input width does not match the model");
  Matrix<float> xb(1, x.size());
  std::copy(x.begin(), x.end(), xb.flat().begin());
  const auto code = net.encode(xb);
  return inspect_code(code.row(0), n_true);
}

// ---------------------------------------------------------------------------
// Experiment protocol

struct PresetSpec {
  int epochs = 100;
  int repeats = 5;
  std::size_t transcription_train = 100000;
  std::size_t transcription_test = 1000;
};

inline PresetSpec preset_spec(Task task, Preset preset) {
  if (preset != Preset::Smoke) return {};
  if (task == Task::Translation) return {10, 2, 100000, 1000};
  return {20, 2, 10000, 1000};
}

struct RepeatResult {
  std::uint64_t seed = 0;
  TrainHistory history;
  EvalMetrics eval;
};

struct ExperimentReport {
  Task task = Task::Translation;
  Mode mode = Mode::Encouraged;
  Preset preset = Preset::Full;
  int epochs = 0;
  int batch_size = 0;
  AdamConfig adam;
  std::vector<std::uint64_t> seeds;
  std::vector<RepeatResult> repeats;
  double mean_exact = 0.0;
  double std_exact = 0.0;  // sample standard deviation (n - 1); 0 for one repeat
};

inline void aggregate(ExperimentReport& report) {
  const auto k = report.repeats.size();
  if (k == 0) return;
  double sum = 0.0;
  for (const auto& r : report.repeats) sum += r.eval.exact_match;
  report.mean_exact = sum / static_cast<double>(k);
  double sq = 0.0;
  for (const auto& r : report.repeats) sq += (r.eval.exact_match - report.mean_exact) * (r.eval.exact_match - report.mean_exact);
  report.std_exact = k > 1 ? std::sqrt(sq / static_cast<double>(k - 1)) : 0.0;
}

struct ExperimentOptions {
  Task task = Task::Translation;
  Mode mode = Mode::Encouraged;
  Preset preset = Preset::Smoke;
  std::uint64_t seed = 1;
  int batch_size = 32;
  AdamConfig adam;
  std::optional<int> epochs_override;
  std::optional<int> repeats_override;
  const std::vector<SemeionRecord>* semeion = nullptr;  // required for transcription
  std::function<void(int repeat, const EpochMetrics&)> on_epoch;
  std::function<void(int repeat, const RepeatResult&)> on_repeat;
};

inline constexpr std::uint64_t kInitTag = 0x696E6974ULL;

/// Trains and evaluates one repeat on data derived from `seed`.
inline RepeatResult run_repeat(const ExperimentOptions& opt, const TrainConfig& cfg, std::uint64_t seed,
                               const TrainHooks& hooks = {}, TraNet* out_net = nullptr) {
  TrainConfig c = cfg;
  c.seed = seed;
  RngStream init = RngStream(seed).split(kInitTag);
  TraNet net = build_tranet(opt.task, init);
  RepeatResult result;
  result.seed = seed;

  auto run = [&](const auto& split) {
    if (opt.mode == Mode::Conventional)
      result.history = train_conventional(net, end_to_end_set(split), c, hooks);
    else
      result.history = train_encouraged(net, encoder_set(split), decoder_set(split), c, hooks);
    result.eval = evaluate(net, eval_set(split));
  };

  if (opt.task == Task::Translation) {
    const auto split = gen_translation_dataset(seed);
    if (!translation_split_ok(split)) throw Error("translation split is not a partition of 0..9999");
    run(split);
  } else {
    if (!opt.semeion) throw DataError(DataError::Kind::Io, "transcription needs the Semeion records");
    const auto spec = preset_spec(opt.task, opt.preset);
    const auto split = gen_transcription_dataset(*opt.semeion, seed, spec.transcription_train, spec.transcription_test);
    if (!transcription_split_ok(split)) throw Error("transcription split shares Semeion images between train and test");
    run(split);
  }
  if (out_net) *out_net = std::move(net);
  return result;
}

/// Repeats training with seeds seed, seed+1, ... and aggregates exact-match rates.
inline ExperimentReport run_experiment(const ExperimentOptions& opt) {
  const auto spec = preset_spec(opt.task, opt.preset);
  TrainConfig cfg;
  cfg.task = opt.task;
  cfg.mode = opt.mode;
  cfg.preset = opt.preset;
  cfg.epochs = opt.epochs_override.value_or(spec.epochs);
  cfg.batch_size = opt.batch_size;
  cfg.adam = opt.adam;
  cfg.validate();
  const int repeats = opt.repeats_override.value_or(spec.repeats);

  ExperimentReport report;
  report.task = opt.task;
  report.mode = opt.mode;
  report.preset = opt.preset;
  report.epochs = cfg.epochs;
  report.batch_size = cfg.batch_size;
  report.adam = cfg.adam;
  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(r);
    report.seeds.push_back(seed);
    TrainHooks hooks;
    if (opt.on_epoch) hooks.on_epoch = [&](const EpochMetrics& m) { opt.on_epoch(r, m); };
    try {
      report.repeats.push_back(run_repeat(opt, cfg, seed, hooks));
    } catch (const NonFiniteLoss& e) {
      throw NonFiniteLoss("repeat " + std::to_string(r) + " (seed " + std::to_string(seed) + "): " + e.what());
    }
    if (opt.on_repeat) opt.on_repeat(r, report.repeats.back());
  }
  aggregate(report);
  return report;
}

}  // namespace tranet
