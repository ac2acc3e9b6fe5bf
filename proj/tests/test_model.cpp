#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "tranet/model.hpp"

using namespace tranet;

namespace {

Matrix<float> random_input(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix<float> x(rows, cols);
  for (auto& v : x.flat()) v = rng.uniform01() < 0.1 ? 1.0f : 0.0f;
  return x;
}

CheckpointError::Kind load_error(std::string_view bytes) {
  try {
    deserialize_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "checkpoint was accepted";
  return CheckpointError::Kind::Io;
}

}  // namespace

TEST(TraNet, ParameterCounts) {
  EXPECT_EQ(build_tranet(Task::Translation, 1).param_count(), 2983490u);
  EXPECT_EQ(build_tranet(Task::Transcription, 1).param_count(), 2557490u);
}

TEST(TraNet, Architecture) {
  const auto net = build_tranet(Task::Translation, 3);
  ASSERT_EQ(net.layers().size(), 4u);
  EXPECT_EQ(net.encoder().size(), 2u);
  EXPECT_EQ(net.decoder().size(), 2u);
  EXPECT_EQ(&net.decoder()[0], &net.layers()[2]);
  EXPECT_EQ(net.encoder()[1].fan_out(), 40u);
  EXPECT_EQ(net.encoder()[1].activation, Activation::Sigmoid);
  EXPECT_EQ(net.decoder()[1].activation, Activation::Sigmoid);
  for (const auto& l : net.layers())
    for (float b : l.bias) ASSERT_EQ(b, 0.0f);
}

TEST(TraNet, InitialisationIsSeeded) {
  EXPECT_EQ(build_tranet(Task::Transcription, 5), build_tranet(Task::Transcription, 5));
  EXPECT_FALSE(build_tranet(Task::Transcription, 5) == build_tranet(Task::Transcription, 6));
}

TEST(TraNet, DecodeOfEncodeIsForward) {
  for (Task task : {Task::Translation, Task::Transcription}) {
    const auto net = build_tranet(task, 7);
    const auto x = random_input(37, input_size(task), 8);
    const auto y = net.forward(x);
    EXPECT_EQ(net.decode(net.encode(x)), y);
    for (float v : y.flat()) {
      ASSERT_GT(v, 0.0f);
      ASSERT_LT(v, 1.0f);
    }
    const auto code = net.encode(x);
    for (float v : code.flat()) {
      ASSERT_GT(v, 0.0f);
      ASSERT_LT(v, 1.0f);
    }
  }
}

TEST(TraNet, DecoderAcceptsArbitraryCodes) {
  const auto net = build_tranet(Task::Translation, 2);
  Matrix<float> codes(3, 40);
  for (std::size_t i = 0; i < codes.size(); ++i) codes.flat()[i] = static_cast<float>(i % 7) * 0.3f - 0.5f;
  const auto out = net.decode(codes);
  EXPECT_EQ(out.rows(), 3u);
  EXPECT_EQ(out.cols(), 1450u);
}

TEST(TraNet, RejectsWrongLayers) {
  auto layers = build_tranet(Task::Translation, 1).layers();
  std::vector<DenseLayer<float>> copy(layers.begin(), layers.end());
  EXPECT_THROW(TraNet(Task::Transcription, copy), CheckpointError);
  copy[1].activation = Activation::ReLU;
  EXPECT_THROW(TraNet(Task::Translation, copy), CheckpointError);
  copy.pop_back();
  EXPECT_THROW(TraNet(Task::Translation, copy), CheckpointError);
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto net = build_tranet(Task::Transcription, 11);
  const auto bytes = serialize_checkpoint(net);
  EXPECT_EQ(bytes.rfind("TRANET 1 transcription 4\n1024 1000 40 1000 1450\nrelu sigmoid relu sigmoid\n", 0), 0u);
  EXPECT_EQ(deserialize_checkpoint(bytes), net);

  const auto dir = std::filesystem::temp_directory_path() / "tranet_test_model";
  std::filesystem::create_directories(dir);
  save_checkpoint(net, dir / "net.bin");
  EXPECT_FALSE(std::filesystem::exists(dir / "net.bin.tmp"));
  const auto loaded = load_checkpoint(dir / "net.bin");
  EXPECT_EQ(loaded, net);
  const auto x = random_input(4, 1024, 12);
  EXPECT_EQ(loaded.forward(x), net.forward(x));
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  using K = CheckpointError::Kind;
  const auto bytes = serialize_checkpoint(build_tranet(Task::Translation, 1));
  EXPECT_EQ(load_error("not a checkpoint\n"), K::BadMagic);
  EXPECT_EQ(load_error(""), K::BadMagic);
  EXPECT_EQ(load_error("TRANET 2 translation 4\n"), K::BadMagic);
  EXPECT_EQ(load_error("TRANET 1 summarisation 4\n"), K::BadMagic);

  std::string wrong_task = bytes;
  wrong_task.replace(wrong_task.find("translation"), 11, "transcription");
  EXPECT_EQ(load_error(wrong_task), K::DimensionMismatch);

  EXPECT_EQ(load_error(std::string_view(bytes).substr(0, bytes.size() - 1)), K::TruncatedFile);
  EXPECT_EQ(load_error(std::string_view(bytes).substr(0, bytes.size() / 2)), K::TruncatedFile);
  EXPECT_EQ(load_error(bytes + "x"), K::DimensionMismatch);

  EXPECT_THROW(load_checkpoint("/nonexistent/tranet.bin"), CheckpointError);
}
