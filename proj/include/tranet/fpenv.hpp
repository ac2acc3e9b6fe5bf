#pragma once

// Saturated sigmoid units produce subnormal floats (exp(-z) underflows past
// |z| ~ 87), and x86 cores handle subnormal operands through a slow microcode
// path. A late training epoch can run ten times slower than an early one.
// While a guard is alive, subnormal inputs and results are treated as zero.
// The previous mode is restored on destruction, so guards nest.

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace tranet {

class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | kFtz | kDaz); }
  ~FlushDenormals() { _mm_setcsr(saved_); }
#else
  FlushDenormals() = default;
#endif
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
#if defined(__SSE2__)
  static constexpr unsigned kFtz = 0x8000;  // flush-to-zero
  static constexpr unsigned kDaz = 0x0040;  // denormals-are-zero
  unsigned saved_;
#endif
};

}  // namespace tranet
