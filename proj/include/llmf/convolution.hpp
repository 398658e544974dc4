#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace llmf {

/// Causal discrete convolution against a fixed kernel:
///   out[i] = sum_{j=0}^{i} a[j] * kernel[i-j],  i < n.
/// Large sizes go through a real FFT whose kernel transform is computed once,
/// so repeated application (fixed-point sweeps, time stepping) is
/// O(n log n) per call. Not thread-safe per instance.
class CausalConvolver {
 public:
  /// measure_plan asks FFTW to time candidate algorithms (slower setup,
  /// faster calls); worth it only for many applications.
  CausalConvolver(std::span<const double> kernel, std::size_t n, bool measure_plan = false);
  ~CausalConvolver();
  CausalConvolver(const CausalConvolver&) = delete;
  CausalConvolver& operator=(const CausalConvolver&) = delete;

  std::size_t size() const { return n_; }
  /// a.size() must be >= n; only the first n entries are used.
  void apply(std::span<const double> a, std::span<double> out);

 private:
  struct Fft;
  std::size_t n_;
  std::vector<double> kernel_;  // kept for the direct path
  std::unique_ptr<Fft> fft_;
};

/// Trapezoid rule for the Volterra convolution integral on a uniform grid:
///   out[i] ~= int_0^{s_i} a(u) k(s_i - u) du
///          = h (conv[i] - a[0] k[i] - a[i] k[0] / 2 + a[0] k_end[i] / 2).
/// k_end holds the kernel's left limits (used where the kernel sits at the
/// end of the range); an empty k_end means k is continuous.
std::vector<double> trapezoid_convolution(std::span<const double> a, std::span<const double> k,
                                          double h, std::span<const double> k_end = {});

/// Same, reusing a prepared convolver whose kernel is k.
void trapezoid_convolution(CausalConvolver& conv, std::span<const double> a,
                           std::span<const double> k, double h, std::span<double> out,
                           std::span<const double> k_end = {});

}  // namespace llmf
