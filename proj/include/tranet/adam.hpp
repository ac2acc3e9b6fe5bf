#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tranet/tensor.hpp"

namespace tranet {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected ADAM over a fixed list of parameter tensors.
template <typename T>
class AdamState {
 public:
  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<const std::size_t> sizes) : cfg_(cfg) {
    for (auto n : sizes) {
      m_.emplace_back(n, T(0));
      v_.emplace_back(n, T(0));
    }
  }

  const AdamConfig& config() const noexcept { return cfg_; }
  std::uint64_t steps() const noexcept { return t_; }
  std::span<const T> first_moment(std::size_t i) const { return m_[i]; }
  std::span<const T> second_moment(std::size_t i) const { return v_[i]; }

  /// One update of every tensor; params[i] and grads[i] must match the sizes given at construction.
  void step(std::span<const std::span<T>> params, std::span<const std::span<const T>> grads) {
    check_shape(params.size() == m_.size() && grads.size() == m_.size(),
                "adam_step: parameter tensor count differs from optimizer state");
    for (std::size_t i = 0; i < m_.size(); ++i)
      check_shape(params[i].size() == m_[i].size() && grads[i].size() == m_[i].size(),
                  "adam_step: tensor size differs from optimizer state");
    ++t_;
    const double td = static_cast<double>(t_);
    const T b1 = static_cast<T>(cfg_.beta1);
    const T b2 = static_cast<T>(cfg_.beta2);
    const T one_b1 = static_cast<T>(1.0 - cfg_.beta1);
    const T one_b2 = static_cast<T>(1.0 - cfg_.beta2);
    const T corr1 = static_cast<T>(1.0 / (1.0 - std::pow(cfg_.beta1, td)));
    const T corr2 = static_cast<T>(1.0 / (1.0 - std::pow(cfg_.beta2, td)));
    const T lr = static_cast<T>(cfg_.learning_rate);
    const T eps = static_cast<T>(cfg_.epsilon);
    for (std::size_t i = 0; i < m_.size(); ++i) {
      T* w = params[i].data();
      const T* g = grads[i].data();
      T* m = m_[i].data();
      T* v = v_[i].data();
      const std::size_t n = m_[i].size();
      for (std::size_t k = 0; k < n; ++k) {
        m[k] = b1 * m[k] + one_b1 * g[k];
        v[k] = b2 * v[k] + one_b2 * (g[k] * g[k]);
        const T m_hat = m[k] * corr1;
        const T v_hat = v[k] * corr2;
        w[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
      }
    }
  }

 private:
  AdamConfig cfg_;
  std::vector<std::vector<T>> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace tranet
