#pragma once

#include <vector>

#include "llmf/model.hpp"

// Closed forms and series for unit-mean exponential job sizes (rho = lambda).

namespace llmf {

/// A truncated series together with a bound on the neglected tail.
struct SeriesValue {
  double value = 0.0;
  double error_bound = 0.0;
  int terms = 0;
};

/// Stationary LL(d) workload ccdf:
/// (lambda + (lambda^{1-d} - lambda) e^{(d-1)s})^{1/(1-d)}.
double ll_workload_ccdf_exp(const ModelParams& p, double s);
/// Workload density -d/ds of the ccdf above (s > 0).
double ll_workload_density_exp(const ModelParams& p, double s);

/// FCFS response-time ccdf: (lambda^d + (1 - lambda^d) e^{(d-1)s})^{1/(1-d)}.
double ll_response_ccdf_exp(const ModelParams& p, double s);
double ll_response_density_exp(const ModelParams& p, double s);

/// Mean workload W_d = sum_{n=0}^{nterms} lambda^{dn+1} / (1 + n(d-1)).
SeriesValue ll_mean_workload(const ModelParams& p, int nterms);
/// Same, with nterms chosen so the tail bound falls below 1e-17 * value.
SeriesValue ll_mean_workload(const ModelParams& p);

/// Mean response T_d = sum_{n=0}^{nterms} lambda^{dn} / (1 + n(d-1)).
SeriesValue ll_mean_response(const ModelParams& p, int nterms);
SeriesValue ll_mean_response(const ModelParams& p);

/// Logarithmic closed forms for d = 2 and d = 3.
double ll_mean_workload_d2(double lambda);
double ll_mean_workload_d3(double lambda);

/// SQ(d) mean response (1/lambda) sum_{k=1}^{kmax} lambda^{(d^k-1)/(d-1)}.
/// Exponents are formed in log space and the loop exits once a term drops
/// below 1e-300.
double sq_mean_response_exp(const ModelParams& p, int kmax = 64);

/// SQ(d) FCFS response-time ccdf
/// sum_n (s^n/n!) e^{-s} lambda^{(d^n-1)d/(d-1)}.
double sq_response_ccdf_exp(const ModelParams& p, double s);

/// Heavy-traffic limit of T^SQ / T^LL: (d-1)/log(d).
double ratio_limit(int d);

struct GapSeries {
  double total = 0.0;          ///< (1/lambda) * sum_k A_k
  std::vector<double> terms;   ///< A_1, A_2, ... (until negligible)
};

/// T^SQ - T^LL written as (1/lambda) sum_k A_k with
/// A_k = lambda^{(d^{k+1}-1)/(d-1)}
///     - sum_{n=1}^{d^k} lambda^{nd+1+(d^{k+1}-d^2)/(d-1)} / (1+n(d-1)+(d^k-d)).
GapSeries ll_sq_gap_series(const ModelParams& p, int kmax = 64);

/// Replication with cancellation-on-completion, exponential(mu) jobs:
/// (1/mu) sum_{n=0}^{nterms} rho^n / (n(d-1) + d). Throws for d < 2.
double rr_mean_response(double rho, int d, double mu, int nterms = 4000);

}  // namespace llmf
