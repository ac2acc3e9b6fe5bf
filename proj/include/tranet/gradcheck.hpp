#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tranet/nn.hpp"

namespace tranet {

/// Max over parameters of |analytic - numeric| / max(1, |analytic| + |numeric|),
/// numeric gradients by central differences of bce_loss with step h.
template <typename T>
double compare_gradients(std::vector<DenseLayer<T>> layers, const Matrix<T>& x, const Matrix<T>& target,
                         const std::vector<LayerGrads<T>>& analytic, T h) {
  auto loss = [&]() {
    return bce_loss(forward_layers<T>(std::span<const DenseLayer<T>>(layers), x), target);
  };
  double worst = 0.0;
  auto probe = [&](T& param, T grad) {
    const T saved = param;
    param = saved + h;
    const double plus = loss();
    param = saved - h;
    const double minus = loss();
    param = saved;
    const double numeric = (plus - minus) / (2.0 * static_cast<double>(h));
    const double a = static_cast<double>(grad);
    worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(a) + std::abs(numeric)));
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t i = 0; i < layers[l].weights.size(); ++i)
      probe(layers[l].weights.flat()[i], analytic[l].weights.flat()[i]);
    for (std::size_t i = 0; i < layers[l].bias.size(); ++i) probe(layers[l].bias[i], analytic[l].bias[i]);
  }
  return worst;
}

template <typename T>
double gradient_check(const std::vector<DenseLayer<T>>& layers, const Matrix<T>& x, const Matrix<T>& target,
                      T h = T(1e-5)) {
  ForwardCache<T> cache;
  std::vector<LayerGrads<T>> grads;
  const std::span<const DenseLayer<T>> view(layers);
  forward_layers(view, x, cache);
  backward_layers(view, cache, target, grads);
  return compare_gradients(layers, x, target, grads, h);
}

}  // namespace tranet
