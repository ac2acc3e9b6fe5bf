#pragma once

// TraNet: input -> 1000 ReLU -> 40 sigmoid -> 1000 ReLU -> 1450 sigmoid.
// The encoder is the first two layers and the decoder the last two; both are
// spans over the same layer storage, so there is a single set of parameters.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tranet/encoding.hpp"
#include "tranet/error.hpp"
#include "tranet/io.hpp"
#include "tranet/nn.hpp"
#include "tranet/rng.hpp"

namespace tranet {

enum class Task { Translation, Transcription };

inline std::string_view to_string(Task t) {
  return t == Task::Translation ? "translation" : "transcription";
}

inline Task task_from_string(std::string_view s) {
  if (s == "translation") return Task::Translation;
  if (s == "transcription") return Task::Transcription;
  throw Error("unknown task '" + std::string(s) + "' (expected translation or transcription)");
}

inline constexpr std::size_t kTranscriptionInputSize = 64 * 16;
inline constexpr std::size_t kHiddenWidth = 1000;
inline constexpr std::size_t kBottleneckWidth = kDigitCodeSize;
inline constexpr std::size_t kEncoderDepth = 2;

inline std::size_t input_size(Task t) {
  return t == Task::Translation ? kLetterCodeSize : kTranscriptionInputSize;
}

inline std::array<std::size_t, 5> tranet_dims(Task t) {
  return {input_size(t), kHiddenWidth, kBottleneckWidth, kHiddenWidth, kLetterCodeSize};
}

inline constexpr std::array<Activation, 4> kTranetActivations = {
    Activation::ReLU, Activation::Sigmoid, Activation::ReLU, Activation::Sigmoid};

class TraNet {
 public:
  TraNet() = default;
  TraNet(Task task, std::vector<DenseLayer<float>> layers) : task_(task), layers_(std::move(layers)) {
    validate();
  }

  Task task() const noexcept { return task_; }
  std::span<DenseLayer<float>> layers() noexcept { return layers_; }
  std::span<const DenseLayer<float>> layers() const noexcept { return layers_; }

  std::span<DenseLayer<float>> encoder() noexcept { return layers().first(kEncoderDepth); }
  std::span<const DenseLayer<float>> encoder() const noexcept { return layers().first(kEncoderDepth); }
  std::span<DenseLayer<float>> decoder() noexcept { return layers().subspan(kEncoderDepth); }
  std::span<const DenseLayer<float>> decoder() const noexcept { return layers().subspan(kEncoderDepth); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.param_count();
    return n;
  }

  Matrix<float> forward(const Matrix<float>& x) const { return forward_layers(layers(), x); }
  /// Bottleneck activations, one 40-vector per row.
  Matrix<float> encode(const Matrix<float>& x) const { return forward_layers(encoder(), x); }
  /// Accepts arbitrary real 40-vectors, not only exact digit codes.
  Matrix<float> decode(const Matrix<float>& codes) const { return forward_layers(decoder(), codes); }

  bool operator==(const TraNet&) const = default;

 private:
  void validate() const {
    const auto dims = tranet_dims(task_);
    if (layers_.size() != kTranetActivations.size())
      throw CheckpointError(CheckpointError::Kind::DimensionMismatch, "TraNet needs exactly 4 layers");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      if (layer.fan_in() != dims[l] || layer.fan_out() != dims[l + 1] || layer.bias.size() != dims[l + 1] ||
          layer.activation != kTranetActivations[l])
        throw CheckpointError(CheckpointError::Kind::DimensionMismatch,
                              "layer " + std::to_string(l) + " does not match the " +
                                  std::string(to_string(task_)) + " TraNet architecture");
    }
  }

  Task task_ = Task::Translation;
  std::vector<DenseLayer<float>> layers_;
};

/// Glorot-uniform weights and zero biases, drawn layer by layer from `rng`.
inline TraNet build_tranet(Task task, RngStream& rng) {
  const auto dims = tranet_dims(task);
  std::vector<DenseLayer<float>> layers;
  for (std::size_t l = 0; l < kTranetActivations.size(); ++l) {
    DenseLayer<float> layer(dims[l], dims[l + 1], kTranetActivations[l]);
    layer.weights = glorot_init<float>(dims[l], dims[l + 1], rng);
    layers.push_back(std::move(layer));
  }
  return TraNet(task, std::move(layers));
}

inline TraNet build_tranet(Task task, std::uint64_t seed) {
  RngStream rng(seed);
  return build_tranet(task, rng);
}

// Checkpoint layout:
//   TRANET 1 <task> <n_layers>\n
//   <d0> <d1> ... <dk>\n
//   <activation> ... \n
//   per layer: W row-major (fan_in rows of fan_out) then b, little-endian float32.

namespace detail {

inline void put_f32_le(std::string& out, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

inline float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace detail

inline std::string serialize_checkpoint(const TraNet& net) {
  std::ostringstream header;
  header << "TRANET 1 " << to_string(net.task()) << ' ' << net.layers().size() << '\n';
  header << net.layers()[0].fan_in();
  for (const auto& l : net.layers()) header << ' ' << l.fan_out();
  header << '\n';
  for (std::size_t l = 0; l < net.layers().size(); ++l)
    header << (l ? " " : "") << to_string(net.layers()[l].activation);
  header << '\n';
  std::string out = header.str();
  out.reserve(out.size() + 4 * net.param_count());
  for (const auto& l : net.layers()) {
    for (float w : l.weights.flat()) detail::put_f32_le(out, w);
    for (float b : l.bias) detail::put_f32_le(out, b);
  }
  return out;
}

inline TraNet deserialize_checkpoint(std::string_view bytes) {
  using K = CheckpointError::Kind;
  std::size_t pos = 0;
  auto next_line = [&](const char* what) {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos)
      throw CheckpointError(pos == 0 ? K::BadMagic : K::TruncatedFile, std::string("missing ") + what + " line");
    std::string line(bytes.substr(pos, nl - pos));
    pos = nl + 1;
    return line;
  };

  std::istringstream l1(next_line("header"));
  std::string magic, task_name;
  int version = 0;
  std::size_t n_layers = 0;
  if (!(l1 >> magic >> version >> task_name >> n_layers) || magic != "TRANET" || version != 1)
    throw CheckpointError(K::BadMagic, "not a TRANET v1 checkpoint");
  Task task;
  try {
    task = task_from_string(task_name);
  } catch (const Error&) {
    throw CheckpointError(K::BadMagic, "unknown task '" + task_name + "' in checkpoint header");
  }
  if (n_layers != kTranetActivations.size())
    throw CheckpointError(K::DimensionMismatch, "checkpoint has " + std::to_string(n_layers) + " layers, expected 4");

  std::istringstream l2(next_line("dimension"));
  std::vector<std::size_t> dims;
  for (std::size_t d; l2 >> d;) dims.push_back(d);
  const auto expected = tranet_dims(task);
  if (dims.size() != expected.size())
    throw CheckpointError(K::DimensionMismatch, "dimension line must list 5 sizes");
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (dims[i] != expected[i])
      throw CheckpointError(K::DimensionMismatch, "dimension " + std::to_string(i) + " is " +
                                                      std::to_string(dims[i]) + " but a " + task_name +
                                                      " TraNet needs " + std::to_string(expected[i]));

  std::istringstream l3(next_line("activation"));
  std::vector<Activation> acts;
  for (std::string tok; l3 >> tok;) {
    try {
      acts.push_back(activation_from_string(tok));
    } catch (const Error& e) {
      throw CheckpointError(K::BadMagic, e.what());
    }
  }
  if (acts.size() != n_layers || !std::equal(acts.begin(), acts.end(), kTranetActivations.begin()))
    throw CheckpointError(K::DimensionMismatch, "activation line does not match TraNet");

  std::vector<DenseLayer<float>> layers;
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  auto take = [&](std::span<float> dst) {
    if (bytes.size() - pos < 4 * dst.size())
      throw CheckpointError(K::TruncatedFile, "checkpoint ends inside the parameter block");
    for (auto& x : dst) {
      x = detail::get_f32_le(raw + pos);
      pos += 4;
    }
  };
  for (std::size_t l = 0; l < n_layers; ++l) {
    DenseLayer<float> layer(dims[l], dims[l + 1], acts[l]);
    take(layer.weights.flat());
    take(layer.bias);
    layers.push_back(std::move(layer));
  }
  if (pos != bytes.size())
    throw CheckpointError(K::DimensionMismatch, "trailing bytes after the parameter block");
  return TraNet(task, std::move(layers));
}

inline void save_checkpoint(const TraNet& net, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(net));
}

inline TraNet load_checkpoint(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    throw CheckpointError(CheckpointError::Kind::Io, e.what());
  }
  return deserialize_checkpoint(bytes);
}

}  // namespace tranet
