#include "llmf/analytic_exp.hpp"

#include <cmath>
#include <stdexcept>

namespace llmf {

namespace {

constexpr int kMaxSeriesTerms = 10'000'000;

// Number of terms after which the geometric tail q^{N+1}/(1-q) drops below
// rel * scale.
int geometric_terms(double q, double rel, double scale) {
  if (q <= 0.0) return 0;
  const double target = rel * scale * (1.0 - q);
  const double n = std::ceil(std::log(target) / std::log(q)) - 1.0;
  if (!(n < kMaxSeriesTerms)) return kMaxSeriesTerms;
  return std::max(0, static_cast<int>(n));
}

SeriesValue ll_series(const ModelParams& p, int nterms, double lead_power) {
  const double lam = p.lambda;
  const int d = p.d;
  SeriesValue out;
  out.terms = nterms;
  if (lam == 0.0) {
    out.value = lead_power == 0.0 ? 1.0 : 0.0;
    return out;
  }
  const double logl = std::log(lam);
  double sum = 0.0;
  for (int n = 0; n <= nterms; ++n) {
    sum += std::exp((static_cast<double>(d) * n + lead_power) * logl) / (1.0 + n * (d - 1.0));
  }
  out.value = sum;
  const double qd = std::pow(lam, d);
  out.error_bound = std::pow(lam, static_cast<double>(d) * (nterms + 1.0)) / (1.0 - qd);
  return out;
}

}  // namespace

double ll_workload_ccdf_exp(const ModelParams& p, double s) {
  const double lam = p.lambda;
  const int d = p.d;
  if (lam <= 0.0) return 0.0;
  const double x = (d - 1.0) * std::max(0.0, s);
  const double b = std::pow(lam, 1.0 - d) - lam;
  // log(lambda + b e^x), kept finite for large x.
  const double log_inner = x + std::log(b) + std::log1p(lam * std::exp(-x) / b);
  return std::exp(log_inner / (1.0 - d));
}

double ll_workload_density_exp(const ModelParams& p, double s) {
  // The ccdf solves Fbar' = lambda Fbar^d - Fbar.
  const double fbar = ll_workload_ccdf_exp(p, s);
  return fbar - p.lambda * std::pow(fbar, p.d);
}

double ll_response_ccdf_exp(const ModelParams& p, double s) {
  const int d = p.d;
  const double ld = std::pow(p.lambda, d);
  const double x = (d - 1.0) * std::max(0.0, s);
  if (ld <= 0.0) return std::exp(-std::max(0.0, s));
  const double log_inner = x + std::log1p(-ld) + std::log1p(ld * std::exp(-x) / (1.0 - ld));
  return std::exp(log_inner / (1.0 - d));
}

double ll_response_density_exp(const ModelParams& p, double s) {
  const double ld = std::pow(p.lambda, p.d);
  const double x = (p.d - 1.0) * std::max(0.0, s);
  const double hazard = 1.0 / (1.0 + ld * std::exp(-x) / (1.0 - ld));
  return ll_response_ccdf_exp(p, s) * hazard;
}

SeriesValue ll_mean_workload(const ModelParams& p, int nterms) { return ll_series(p, nterms, 1.0); }

SeriesValue ll_mean_workload(const ModelParams& p) {
  const double q = std::pow(p.lambda, p.d);
  return ll_mean_workload(p, geometric_terms(q, 1e-17, std::max(p.lambda, 1e-300)));
}

SeriesValue ll_mean_response(const ModelParams& p, int nterms) { return ll_series(p, nterms, 0.0); }

SeriesValue ll_mean_response(const ModelParams& p) {
  const double q = std::pow(p.lambda, p.d);
  return ll_mean_response(p, geometric_terms(q, 1e-17, 1.0));
}

double ll_mean_workload_d2(double lambda) {
  if (lambda == 0.0) return 0.0;
  return -std::log1p(-lambda * lambda) / lambda;
}

double ll_mean_workload_d3(double lambda) {
  if (lambda == 0.0) return 0.0;
  const double x = std::pow(lambda, 1.5);
  return -std::log(std::sqrt(1.0 - lambda * lambda * lambda) / (x + 1.0)) / std::sqrt(lambda);
}

double sq_mean_response_exp(const ModelParams& p, int kmax) {
  const double lam = p.lambda;
  const double d = p.d;
  if (lam == 0.0) return 1.0;
  const double logl = std::log(lam);
  double sum = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double expo = (std::pow(d, k) - 1.0) / (d - 1.0);
    const double term = std::exp(expo * logl);
    if (term < 1e-300) break;
    sum += term;
  }
  return sum / lam;
}

double sq_response_ccdf_exp(const ModelParams& p, double s) {
  s = std::max(0.0, s);
  const double lam = p.lambda;
  const double d = p.d;
  if (lam == 0.0) return std::exp(-s);
  if (s == 0.0) return 1.0;
  const double logl = std::log(lam);
  const double logs = std::log(s);
  double sum = 0.0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double log_factor = (std::pow(d, n) - 1.0) * d / (d - 1.0) * logl;
    if (log_factor < -745.0) break;  // this and every later term underflows
    const double log_w = n * logs - s - std::lgamma(n + 1.0);
    sum += std::exp(log_w + log_factor);
    if (n + 2.0 > s) {
      // Poisson tail beyond n bounded by w_{n+1} / (1 - s/(n+2)).
      const double log_next = (n + 1.0) * logs - s - std::lgamma(n + 2.0);
      const double tail = std::exp(log_next) / (1.0 - s / (n + 2.0));
      if (tail < 1e-14) break;
    }
  }
  return std::min(1.0, sum);
}

double ratio_limit(int d) {
  if (d < 2) throw std::invalid_argument("ratio_limit: d must be >= 2");
  return (d - 1.0) / std::log(static_cast<double>(d));
}

GapSeries ll_sq_gap_series(const ModelParams& p, int kmax) {
  GapSeries out;
  const double lam = p.lambda;
  const double d = p.d;
  if (lam == 0.0) return out;
  const double logl = std::log(lam);
  double sum = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double dk = std::pow(d, k);
    const double lead = std::exp((dk * d - 1.0) / (d - 1.0) * logl);
    // Every inner term is at most lead, so |A_k| <= d^k * lead.
    if (lead == 0.0 || dk * lead < 1e-18 * std::abs(sum)) break;
    const double shift = (dk * d - d * d) / (d - 1.0);
    double inner = 0.0;
    const auto count = static_cast<long long>(dk);
    for (long long n = 1; n <= count; ++n) {
      const double term = std::exp((n * d + 1.0 + shift) * logl) /
                          (1.0 + n * (d - 1.0) + (dk - d));
      inner += term;
      if (term * static_cast<double>(count - n) < 1e-19 * lead) break;
    }
    const double a_k = lead - inner;
    out.terms.push_back(a_k);
    sum += a_k;
  }
  out.total = sum / lam;
  return out;
}

double rr_mean_response(double rho, int d, double mu, int nterms) {
  if (d < 2) throw std::invalid_argument("rr_mean_response: d must be >= 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rr_mean_response: need 0 <= rho < 1");
  if (!(mu > 0.0)) throw std::invalid_argument("rr_mean_response: mu must be positive");
  double sum = 0.0;
  double rn = 1.0;
  for (int n = 0; n <= nterms; ++n) {
    sum += rn / (n * (d - 1.0) + d);
    rn *= rho;
    if (rn < 1e-18) break;
  }
  return sum / mu;
}

}  // namespace llmf
