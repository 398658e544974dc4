#include "llmf/convolution.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace llmf {

namespace {

constexpr std::size_t kDirectLimit = 96;

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Smallest 2^a 3^b 5^c that holds the linear convolution of length 2n - 1.
std::size_t fft_size(std::size_t n) {
  const std::size_t need = 2 * n - 1;
  std::size_t best = 1;
  while (best < need) best <<= 1;
  for (std::size_t p5 = 1; p5 < best; p5 *= 5) {
    for (std::size_t p35 = p5; p35 < best; p35 *= 3) {
      std::size_t p = p35;
      while (p < need) p <<= 1;
      best = std::min(best, p);
    }
  }
  return best;
}

}  // namespace

struct CausalConvolver::Fft {
  std::size_t padded = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  std::vector<std::complex<double>> kernel_spec;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Fft(std::size_t p, unsigned flags) : padded(p) {
    real = static_cast<double*>(fftw_malloc(sizeof(double) * p));
    spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (p / 2 + 1)));
    if (!real || !spec) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(p), real, spec, flags);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(p), spec, real, flags);
  }
  ~Fft() {
    {
      std::lock_guard lock(planner_mutex());
      if (forward) fftw_destroy_plan(forward);
      if (backward) fftw_destroy_plan(backward);
    }
    fftw_free(real);
    fftw_free(spec);
  }
};

CausalConvolver::CausalConvolver(std::span<const double> kernel, std::size_t n, bool measure_plan)
    : n_(n) {
  if (kernel.size() < n) throw std::invalid_argument("CausalConvolver: kernel shorter than n");
  kernel_.assign(kernel.begin(), kernel.begin() + static_cast<std::ptrdiff_t>(n));
  if (n <= kDirectLimit) return;
  fft_ = std::make_unique<Fft>(fft_size(n), measure_plan ? FFTW_MEASURE : FFTW_ESTIMATE);
  const std::size_t p = fft_->padded;
  std::fill(fft_->real, fft_->real + p, 0.0);
  std::copy(kernel_.begin(), kernel_.end(), fft_->real);
  fftw_execute(fft_->forward);
  fft_->kernel_spec.resize(p / 2 + 1);
  for (std::size_t i = 0; i <= p / 2; ++i) {
    fft_->kernel_spec[i] = {fft_->spec[i][0], fft_->spec[i][1]};
  }
}

CausalConvolver::~CausalConvolver() = default;

void CausalConvolver::apply(std::span<const double> a, std::span<double> out) {
  if (a.size() < n_ || out.size() < n_) throw std::invalid_argument("CausalConvolver: size mismatch");
  if (!fft_) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += a[j] * kernel_[i - j];
      out[i] = acc;
    }
    return;
  }
  const std::size_t p = fft_->padded;
  std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n_), fft_->real);
  std::fill(fft_->real + n_, fft_->real + p, 0.0);
  fftw_execute(fft_->forward);
  for (std::size_t i = 0; i <= p / 2; ++i) {
    const std::complex<double> z(fft_->spec[i][0], fft_->spec[i][1]);
    const auto prod = z * fft_->kernel_spec[i];
    fft_->spec[i][0] = prod.real();
    fft_->spec[i][1] = prod.imag();
  }
  fftw_execute(fft_->backward);
  const double scale = 1.0 / static_cast<double>(p);
  for (std::size_t i = 0; i < n_; ++i) out[i] = fft_->real[i] * scale;
}

void trapezoid_convolution(CausalConvolver& conv, std::span<const double> a,
                           std::span<const double> k, double h, std::span<double> out,
                           std::span<const double> k_end) {
  const std::size_t n = conv.size();
  if (!k_end.empty() && k_end.size() < n) {
    throw std::invalid_argument("trapezoid_convolution: k_end shorter than the grid");
  }
  conv.apply(a, out);
  for (std::size_t i = 0; i < n; ++i) {
    const double far = k_end.empty() ? k[i] : k_end[i];
    out[i] = i == 0 ? 0.0 : h * (out[i] - a[0] * k[i] + 0.5 * (a[0] * far - a[i] * k[0]));
  }
}

std::vector<double> trapezoid_convolution(std::span<const double> a, std::span<const double> k,
                                          double h, std::span<const double> k_end) {
  const std::size_t n = std::min(a.size(), k.size());
  CausalConvolver conv(k, n);
  std::vector<double> out(n);
  trapezoid_convolution(conv, a, k, h, out, k_end);
  return out;
}

}  // namespace llmf
