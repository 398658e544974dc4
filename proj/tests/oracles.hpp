#pragma once

// Reference computations used by the tests. Each one takes a different
// route from the library code it checks: direct O(n^2) sums instead of FFT
// convolution, adaptive Simpson instead of grid trapezoids, dense matrix
// inverses instead of level reduction, and closed forms where they exist.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "llmf/curve.hpp"
#include "llmf/jobsize.hpp"
#include "llmf/model.hpp"

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// Integral over [a, b] split at the given break points (kinks, jumps).
inline double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                               std::vector<double> breaks, double tol = 1e-12) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi > lo) sum += integrate(f, lo, hi, tol);
  }
  return sum;
}

/// (T_d Fbar)(s_i) by a direct trapezoid sum, O(n^2), kernel from law.ccdf
/// (the law must be continuous).
inline llmf::CcdfCurve direct_td(const llmf::CcdfCurve& c, const llmf::JobSizeLaw& law,
                                 const llmf::ModelParams& p) {
  const std::size_t n = c.size();
  llmf::CcdfCurve out(c.h, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      const double w = (j == 0 || j == i) ? 0.5 : 1.0;
      acc += w * (1.0 - std::pow(c.values[j], p.d)) * law.ccdf(c.h * static_cast<double>(i - j));
    }
    if (i == 0) acc = 0.0;
    out.values[i] = std::max(0.0, p.rho - p.lambda * c.h * acc);
  }
  return out;
}

/// Mean alpha (-A)^{-1} 1 through an explicit inverse.
inline double ph_mean_by_inverse(const llmf::PhRep& ph) {
  const Eigen::MatrixXd inv = (-ph.A).inverse();
  return (ph.alpha * inv * Eigen::VectorXd::Ones(ph.phases()))(0);
}

/// SQ(d) exponential stationary tails P(Q >= k) = lambda^{(d^k - 1)/(d - 1)}.
inline double sq_exp_tail(double lambda, int d, int k) {
  return std::pow(lambda, (std::pow(d, k) - 1.0) / (d - 1.0));
}

/// Deterministic unit jobs, d = 2, s in [0, 1): Fbar' = lambda (Fbar^2 - 1)
/// with Fbar(0) = lambda solves to tanh(atanh(lambda) - lambda s).
inline double det_d2_initial(double lambda, double s) {
  return std::tanh(std::atanh(lambda) - lambda * s);
}

/// Response ccdf for unit exponential jobs from a workload ccdf function:
/// e^{-s} + int_0^s Fbar(s - u)^d e^{-u} du by adaptive Simpson.
inline double exp_response_from_workload(const std::function<double(double)>& fbar, int d,
                                         double s) {
  const auto integrand = [&](double u) { return std::pow(fbar(s - u), d) * std::exp(-u); };
  return std::exp(-s) + integrate(integrand, 0.0, s, 1e-13);
}

/// Random nonincreasing curve on n points with value rho at 0 and values in
/// [0, rho]: a sorted uniform sample.
inline llmf::CcdfCurve random_ccdf(std::mt19937_64& rng, double h, std::size_t n, double rho) {
  std::uniform_real_distribution<double> u(0.0, rho);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  std::sort(v.begin(), v.end(), std::greater<>());
  v[0] = rho;
  // Push the far end to 0 so the curve looks like a ccdf tail.
  const double decay = 3.0 / (h * static_cast<double>(n));
  for (std::size_t i = 1; i < n; ++i) v[i] *= std::exp(-decay * h * static_cast<double>(i));
  return llmf::CcdfCurve(h, std::move(v));
}

/// Sup norm of a - b over a's grid, reading b by interpolation.
inline double sup_distance_interp(const llmf::CcdfCurve& a, const llmf::CcdfCurve& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.at(a.s(i))));
  return m;
}

}  // namespace oracle
