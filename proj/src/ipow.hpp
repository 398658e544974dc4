#pragma once

namespace llmf::detail {

// x^n for small nonnegative n; std::pow is several times slower in the
// per-grid-point loops.
inline double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

}  // namespace llmf::detail
