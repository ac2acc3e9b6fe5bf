#pragma once

// Dense layers, binary cross-entropy and reverse-mode gradients over a
// contiguous range of layers.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tranet/error.hpp"
#include "tranet/fpenv.hpp"
#include "tranet/rng.hpp"
#include "tranet/tensor.hpp"

namespace tranet {

enum class Activation { ReLU, Sigmoid };

inline std::string_view to_string(Activation a) { return a == Activation::ReLU ? "relu" : "sigmoid"; }

inline Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw Error("unknown activation '" + std::string(s) + "'");
}

template <typename T>
struct DenseLayer {
  Matrix<T> weights;  // fan_in x fan_out
  std::vector<T> bias;
  Activation activation = Activation::ReLU;

  DenseLayer() = default;
  DenseLayer(std::size_t fan_in, std::size_t fan_out, Activation act)
      : weights(fan_in, fan_out), bias(fan_out, T(0)), activation(act) {}

  std::size_t fan_in() const { return weights.rows(); }
  std::size_t fan_out() const { return weights.cols(); }
  std::size_t param_count() const { return weights.size() + bias.size(); }

  bool operator==(const DenseLayer&) const = default;
};

/// Glorot/Xavier uniform weights in +-sqrt(6 / (fan_in + fan_out)).
template <typename T>
Matrix<T> glorot_init(std::size_t fan_in, std::size_t fan_out, RngStream& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix<T> w(fan_in, fan_out);
  for (auto& x : w.flat()) x = static_cast<T>(rng.uniform(-limit, limit));
  return w;
}

template <typename T>
inline T sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

template <typename T>
void apply_bias_activation(Matrix<T>& z, std::span<const T> bias, Activation act) {
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    if (act == Activation::ReLU) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        const T v = row[c] + bias[c];
        row[c] = v > T(0) ? v : T(0);
      }
    } else {
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = sigmoid(row[c] + bias[c]);
    }
  }
}

/// out = activation(x W + b), row-wise.
template <typename T>
void dense_forward(const DenseLayer<T>& layer, const Matrix<T>& x, Matrix<T>& out) {
  check_shape(x.cols() == layer.fan_in(),
              "dense_forward: input has " + std::to_string(x.cols()) + " columns, layer expects " +
                  std::to_string(layer.fan_in()));
  matmul(x, layer.weights, out);
  apply_bias_activation<T>(out, layer.bias, layer.activation);
}

template <typename T>
Matrix<T> dense_forward(const DenseLayer<T>& layer, const Matrix<T>& x) {
  Matrix<T> out;
  dense_forward(layer, x, out);
  return out;
}

inline constexpr double kBceClamp = 1e-7;

/// Mean over all elements of -[t ln y + (1 - t) ln(1 - y)], y clamped to [1e-7, 1 - 1e-7].
template <typename T>
double bce_loss(const Matrix<T>& y, const Matrix<T>& t) {
  check_shape(y.rows() == t.rows() && y.cols() == t.cols(), "bce_loss: shapes differ");
  if (y.size() == 0) return 0.0;
  double sum = 0.0;
  const auto yf = y.flat();
  const auto tf = t.flat();
  for (std::size_t i = 0; i < yf.size(); ++i) {
    double p = static_cast<double>(yf[i]);
    p = p < kBceClamp ? kBceClamp : (p > 1.0 - kBceClamp ? 1.0 - kBceClamp : p);
    const double tv = static_cast<double>(tf[i]);
    sum -= tv * std::log(p) + (1.0 - tv) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(yf.size());
}

/// Activations of every layer boundary; acts[0] is the input.
template <typename T>
struct ForwardCache {
  std::vector<Matrix<T>> acts;
  const Matrix<T>& output() const { return acts.back(); }
};

template <typename T>
void forward_layers(std::span<const DenseLayer<T>> layers, const Matrix<T>& x,
                    ForwardCache<T>& cache) {
  const FlushDenormals ftz;
  cache.acts.resize(layers.size() + 1);
  cache.acts[0] = x;
  for (std::size_t l = 0; l < layers.size(); ++l)
    dense_forward(layers[l], cache.acts[l], cache.acts[l + 1]);
}

template <typename T>
Matrix<T> forward_layers(std::span<const DenseLayer<T>> layers, const Matrix<T>& x) {
  const FlushDenormals ftz;
  Matrix<T> a = x, next;
  for (const auto& layer : layers) {
    dense_forward(layer, a, next);
    std::swap(a, next);
  }
  return a;
}

template <typename T>
struct LayerGrads {
  Matrix<T> weights;
  std::vector<T> bias;
};

/// Gradients of bce_loss(forward(x), target) for every layer of the range.
///
/// The last layer must be sigmoid; its pre-activation gradient uses the fused
/// form (y - t) / (rows * cols). The gradient with respect to the range input
/// is never formed.
template <typename T>
void backward_layers(std::span<const DenseLayer<T>> layers, const ForwardCache<T>& cache,
                     const Matrix<T>& target, std::vector<LayerGrads<T>>& grads) {
  check_shape(!layers.empty() && cache.acts.size() == layers.size() + 1, "backward: stale cache");
  check_shape(layers.back().activation == Activation::Sigmoid,
              "backward: output layer must be sigmoid for the fused BCE gradient");
  const auto& y = cache.output();
  check_shape(y.rows() == target.rows() && y.cols() == target.cols(),
              "backward: target shape differs from output");
  grads.resize(layers.size());

  const T scale = T(1) / static_cast<T>(y.size());
  Matrix<T> dz(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.size(); ++i) dz.flat()[i] = (y.flat()[i] - target.flat()[i]) * scale;

  Matrix<T> da;
  for (std::size_t l = layers.size(); l-- > 0;) {
    auto& g = grads[l];
    matmul_tn(cache.acts[l], dz, g.weights);
    g.bias.assign(dz.cols(), T(0));
    for (std::size_t r = 0; r < dz.rows(); ++r) {
      const auto row = dz.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) g.bias[c] += row[c];
    }
    if (l == 0) break;
    matmul_nt(dz, layers[l].weights, da);
    const auto& a = cache.acts[l];
    const Activation act = layers[l - 1].activation;
    for (std::size_t i = 0; i < da.size(); ++i) {
      const T av = a.flat()[i];
      da.flat()[i] *= act == Activation::ReLU ? (av > T(0) ? T(1) : T(0)) : av * (T(1) - av);
    }
    std::swap(dz, da);
  }
}

}  // namespace tranet
