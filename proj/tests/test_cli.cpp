#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "support/semeion_fixture.hpp"
#include "tranet/io.hpp"
#include "tranet/plot.hpp"
#include "tranet/report.hpp"

namespace fs = std::filesystem;
using namespace tranet;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(TRANET_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "tranet_test_cli";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    fixture::write_semeion_fixture(dir_ / "semeion.data");
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static inline fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenDataTranslationIsReproducible) {
  auto r = run("gen-data --task translation --seed 3 --out " + path("tr_a"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("config {"), std::string::npos);
  ASSERT_EQ(run("gen-data --task translation --seed 3 --out " + path("tr_b")).status, 0);

  const auto train = read_file(path("tr_a/train.tsv"));
  const auto test = read_file(path("tr_a/test.tsv"));
  EXPECT_EQ(count_lines(train), 9900u);
  EXPECT_EQ(count_lines(test), 100u);
  EXPECT_EQ(parse_translation_tsv(test), gen_translation_dataset(3).test);
  EXPECT_EQ(train, read_file(path("tr_b/train.tsv")));
  EXPECT_EQ(test, read_file(path("tr_b/test.tsv")));
  EXPECT_EQ(read_file(path("tr_a/dataset.json")), read_file(path("tr_b/dataset.json")));
}

TEST_F(Cli, GenDataTranscriptionAndImageDump) {
  auto r = run("gen-data --task transcription --seed 2 --train-size 40 --test-size 6 --semeion " +
               path("semeion.data") + " --out " + path("tc"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto images = read_file(path("tc/test_images.bin"));
  const auto test = parse_transcription(images, read_file(path("tc/test_index.tsv")));
  ASSERT_EQ(test.size(), 6u);
  EXPECT_EQ(read_file(path("tc/train_images.bin")).size(), 40u * 1024u);

  r = run("plot --dump-image " + path("tc/test_images.bin") + " --index 4 --out " + path("img.pgm"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(parse_pgm(read_file(path("img.pgm"))), test[4].image);
  EXPECT_NE(run("plot --dump-image " + path("tc/test_images.bin") + " --index 6 --out " + path("bad.pgm")).status, 0);
}

TEST_F(Cli, TrainEvalDemoAndPlot) {
  ASSERT_EQ(run("gen-data --task translation --seed 1 --out " + path("data")).status, 0);
  auto r = run("train --task translation --mode encouraged --epochs 1 --data " + path("data") + " --out-model " +
               path("model.bin") + " --out-report " + path("train.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto report = report_from_string(read_file(path("train.json")));
  ASSERT_EQ(report.repeats.size(), 1u);
  EXPECT_EQ(report.repeats[0].history.size(), 2u);
  EXPECT_EQ(report.repeats[0].eval.n_test, 100u);

  r = run("eval --model " + path("model.bin") + " --data " + path("data") + " --out-report " + path("eval.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(fs::exists(path("eval.json")));

  r = run("demo --model " + path("model.bin") + " --input 'twenty-five' --expect 25");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("config {"), std::string::npos);
  EXPECT_EQ(run("demo --model " + path("model.bin") + " --input 'Twenty five'").status, 3);

  r = run("plot --report " + path("train.json") + " --out " + path("loss.svg"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto svg = read_file(path("loss.svg"));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  std::size_t polylines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
  EXPECT_EQ(polylines, 2u);

  // A translation model cannot be evaluated on transcription data.
  ASSERT_EQ(run("gen-data --task transcription --train-size 4 --test-size 4 --semeion " + path("semeion.data") +
                " --out " + path("tc_small"))
                .status,
            0);
  r = run("eval --model " + path("model.bin") + " --data " + path("tc_small"));
  EXPECT_EQ(r.status, 3) << r.out;
}

TEST_F(Cli, UsageAndDataErrors) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("gen-data --task translation").status, 2);
  EXPECT_EQ(run("gen-data --task poetry --out " + path("x")).status, 2);
  EXPECT_EQ(run("experiment --task translation --mode encouraged --preset huge --out " + path("x.json")).status, 2);
  EXPECT_EQ(run("gen-data --task transcription --semeion " + path("missing.data") + " --out " + path("y")).status, 3);
  EXPECT_EQ(run("eval --model " + path("missing.bin") + " --data " + path("y")).status, 3);
  EXPECT_NE(run("fetch-semeion --offline --out " + path("s.data")).status, 0);
  EXPECT_FALSE(fs::exists(path("s.data")));
}
