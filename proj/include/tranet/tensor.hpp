#pragma once

// Row-major dense matrices and the three matrix products backprop needs.
//
// Every kernel accumulates each output element in a fixed order (ascending
// over the contracted index, or a fixed lane split for the A*B^T dot products)
// so results depend only on the operand shapes and values, never on how rows
// are tiled. Zero entries of the left operand are skipped on the sparse paths;
// adding a*b with a == 0 leaves a finite accumulator unchanged, so the sparse
// and dense paths agree bitwise.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tranet/error.hpp"

namespace tranet {

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  /// Reshape without preserving contents; keeps capacity when shrinking.
  void resize(std::size_t rows, std::size_t cols) {
    rows_ = rows;
    cols_ = cols;
    data_.resize(rows * cols);
  }
  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

inline void check_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

namespace kernel {

// 64-byte vectors with element alignment, so loads from arbitrary rows are legal.
template <typename T>
struct Vec;
template <>
struct Vec<float> {
  typedef float type __attribute__((vector_size(64), aligned(4)));
};
template <>
struct Vec<double> {
  typedef double type __attribute__((vector_size(64), aligned(8)));
};
template <typename T>
using vec_t = typename Vec<T>::type;
template <typename T>
inline constexpr std::size_t kLanes = 64 / sizeof(T);

template <typename T>
inline vec_t<T> load(const T* p) {
  return *reinterpret_cast<const vec_t<T>*>(p);
}
template <typename T>
inline void store(T* p, vec_t<T> v) {
  *reinterpret_cast<vec_t<T>*>(p) = v;
}
template <typename T>
inline vec_t<T> splat(T x) {
  return vec_t<T>{} + x;
}

template <typename T>
bool mostly_zero(std::span<const T> a) {
  std::size_t zeros = 0;
  for (T x : a) zeros += (x == T(0));
  return zeros * 2 > a.size();
}

// C[MxN] (+)= A[MxK] * B[KxN], dense, register tiles of R rows x 2 vectors.
template <typename T, std::size_t R>
inline void nn_tile(const T* A, const T* B, T* C, std::size_t i, std::size_t j, std::size_t N,
                    std::size_t K, bool accumulate) {
  constexpr std::size_t L = kLanes<T>;
  using V = vec_t<T>;
  V acc[R][2];
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t h = 0; h < 2; ++h)
      acc[r][h] = accumulate ? load(C + (i + r) * N + j + h * L) : V{};
  for (std::size_t k = 0; k < K; ++k) {
    const V b0 = load(B + k * N + j);
    const V b1 = load(B + k * N + j + L);
    for (std::size_t r = 0; r < R; ++r) {
      const V a = splat(A[(i + r) * K + k]);
      acc[r][0] += a * b0;
      acc[r][1] += a * b1;
    }
  }
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t h = 0; h < 2; ++h) store(C + (i + r) * N + j + h * L, acc[r][h]);
}

template <typename T>
void gemm_nn_dense(const T* A, const T* B, T* C, std::size_t M, std::size_t N, std::size_t K,
                   bool accumulate) {
  constexpr std::size_t NW = 2 * kLanes<T>;
  const std::size_t n_vec = N - N % NW;
  for (std::size_t j = 0; j < n_vec; j += NW) {
    std::size_t i = 0;
    for (; i + 8 <= M; i += 8) nn_tile<T, 8>(A, B, C, i, j, N, K, accumulate);
    for (; i < M; ++i) nn_tile<T, 1>(A, B, C, i, j, N, K, accumulate);
  }
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = n_vec; j < N; ++j) {
      T acc = accumulate ? C[i * N + j] : T(0);
      for (std::size_t k = 0; k < K; ++k) acc += A[i * K + k] * B[k * N + j];
      C[i * N + j] = acc;
    }
  }
}

// Same product, iterating only over the nonzeros of each row of A.
template <typename T>
void gemm_nn_sparse(const T* A, const T* B, T* C, std::size_t M, std::size_t N, std::size_t K,
                    bool accumulate) {
  constexpr std::size_t L = kLanes<T>;
  const std::size_t n_vec = N - N % L;
  for (std::size_t i = 0; i < M; ++i) {
    T* c = C + i * N;
    if (!accumulate) std::fill(c, c + N, T(0));
    for (std::size_t k = 0; k < K; ++k) {
      const T a = A[i * K + k];
      if (a == T(0)) continue;
      const T* b = B + k * N;
      const auto av = splat(a);
      for (std::size_t j = 0; j < n_vec; j += L) store(c + j, load(c + j) + av * load(b + j));
      for (std::size_t j = n_vec; j < N; ++j) c[j] += a * b[j];
    }
  }
}

// C[KxN] = A[MxK]^T * B[MxN]; accumulation over i ascending.
template <typename T>
void gemm_tn_dense(const T* A, const T* B, T* C, std::size_t M, std::size_t N, std::size_t K) {
  constexpr std::size_t L = kLanes<T>;
  constexpr std::size_t NW = 2 * L;
  using V = vec_t<T>;
  const std::size_t n_vec = N - N % NW;
  for (std::size_t j = 0; j < n_vec; j += NW) {
    std::size_t k = 0;
    for (; k + 4 <= K; k += 4) {
      V acc[4][2] = {};
      for (std::size_t i = 0; i < M; ++i) {
        const V b0 = load(B + i * N + j);
        const V b1 = load(B + i * N + j + L);
        for (std::size_t r = 0; r < 4; ++r) {
          const V a = splat(A[i * K + k + r]);
          acc[r][0] += a * b0;
          acc[r][1] += a * b1;
        }
      }
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t h = 0; h < 2; ++h) store(C + (k + r) * N + j + h * L, acc[r][h]);
    }
    for (; k < K; ++k) {
      V acc0{}, acc1{};
      for (std::size_t i = 0; i < M; ++i) {
        const V a = splat(A[i * K + k]);
        acc0 += a * load(B + i * N + j);
        acc1 += a * load(B + i * N + j + L);
      }
      store(C + k * N + j, acc0);
      store(C + k * N + j + L, acc1);
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = n_vec; j < N; ++j) {
      T acc = T(0);
      for (std::size_t i = 0; i < M; ++i) acc += A[i * K + k] * B[i * N + j];
      C[k * N + j] = acc;
    }
  }
}

template <typename T>
void gemm_tn_sparse(const T* A, const T* B, T* C, std::size_t M, std::size_t N, std::size_t K) {
  constexpr std::size_t L = kLanes<T>;
  const std::size_t n_vec = N - N % L;
  std::fill(C, C + K * N, T(0));
  for (std::size_t i = 0; i < M; ++i) {
    const T* b = B + i * N;
    for (std::size_t k = 0; k < K; ++k) {
      const T a = A[i * K + k];
      if (a == T(0)) continue;
      T* c = C + k * N;
      const auto av = splat(a);
      for (std::size_t j = 0; j < n_vec; j += L) store(c + j, load(c + j) + av * load(b + j));
      for (std::size_t j = n_vec; j < N; ++j) c[j] += a * b[j];
    }
  }
}

// C[MxK] = A[MxN] * B[KxN]^T as lane-split dot products.
template <typename T>
void gemm_nt(const T* A, const T* B, T* C, std::size_t M, std::size_t N, std::size_t K) {
  constexpr std::size_t L = kLanes<T>;
  using V = vec_t<T>;
  const std::size_t n_vec = N - N % L;
  auto finish = [&](V acc, const T* a, const T* b) {
    T s = T(0);
    for (std::size_t l = 0; l < L; ++l) s += acc[l];
    for (std::size_t j = n_vec; j < N; ++j) s += a[j] * b[j];
    return s;
  };
  for (std::size_t k0 = 0; k0 < K; k0 += 4) {
    const std::size_t kn = std::min<std::size_t>(4, K - k0);
    std::size_t i = 0;
    if (kn == 4) {
      for (; i + 4 <= M; i += 4) {
        V acc[4][4] = {};
        for (std::size_t j = 0; j < n_vec; j += L) {
          V b[4], a[4];
          for (std::size_t q = 0; q < 4; ++q) b[q] = load(B + (k0 + q) * N + j);
          for (std::size_t r = 0; r < 4; ++r) a[r] = load(A + (i + r) * N + j);
          for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t q = 0; q < 4; ++q) acc[r][q] += a[r] * b[q];
        }
        for (std::size_t r = 0; r < 4; ++r)
          for (std::size_t q = 0; q < 4; ++q)
            C[(i + r) * K + k0 + q] = finish(acc[r][q], A + (i + r) * N, B + (k0 + q) * N);
      }
    }
    for (; i < M; ++i) {
      for (std::size_t q = 0; q < kn; ++q) {
        V acc{};
        for (std::size_t j = 0; j < n_vec; j += L)
          acc += load(A + i * N + j) * load(B + (k0 + q) * N + j);
        C[i * K + k0 + q] = finish(acc, A + i * N, B + (k0 + q) * N);
      }
    }
  }
}

}  // namespace kernel

/// out = a * b (or out += a * b).
template <typename T>
void matmul(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out, bool accumulate = false) {
  check_shape(a.cols() == b.rows(), "matmul: inner dimensions differ");
  if (accumulate)
    check_shape(out.rows() == a.rows() && out.cols() == b.cols(), "matmul: accumulator shape");
  else
    out.resize(a.rows(), b.cols());
  if (kernel::mostly_zero(a.flat()))
    kernel::gemm_nn_sparse(a.data(), b.data(), out.data(), a.rows(), b.cols(), a.cols(), accumulate);
  else
    kernel::gemm_nn_dense(a.data(), b.data(), out.data(), a.rows(), b.cols(), a.cols(), accumulate);
}

/// out = a^T * b.
template <typename T>
void matmul_tn(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out) {
  check_shape(a.rows() == b.rows(), "matmul_tn: row counts differ");
  out.resize(a.cols(), b.cols());
  if (kernel::mostly_zero(a.flat()))
    kernel::gemm_tn_sparse(a.data(), b.data(), out.data(), a.rows(), b.cols(), a.cols());
  else
    kernel::gemm_tn_dense(a.data(), b.data(), out.data(), a.rows(), b.cols(), a.cols());
}

/// out = a * b^T.
template <typename T>
void matmul_nt(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out) {
  check_shape(a.cols() == b.cols(), "matmul_nt: column counts differ");
  out.resize(a.rows(), b.rows());
  kernel::gemm_nt(a.data(), b.data(), out.data(), a.rows(), a.cols(), b.rows());
}

}  // namespace tranet
