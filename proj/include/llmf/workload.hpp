#pragma once

#include <vector>

#include "llmf/curve.hpp"
#include "llmf/jobsize.hpp"
#include "llmf/model.hpp"

namespace llmf {

/// Join-probability terms of a workload ccdf for d sampled servers:
/// density c_d(u) = f(u) Fbar(u)^{d-1} and cumulative C_d(u) = (1 - Fbar(u)^d) / d.
struct SelectionTerms {
  std::vector<double> c;
  std::vector<double> C;
};

/// Density f = -dFbar/ds by differences on the grid: central inside,
/// second-order one-sided at both ends.
std::vector<double> density_from_ccdf(const CcdfCurve& curve);

SelectionTerms selection_density_terms(const CcdfCurve& curve, int d);

/// One application of the stationary operator,
///   (T_d Fbar)(s) = rho - lambda * int_0^s (1 - Fbar(u)^d) Gbar(s-u) du,
/// evaluated by the trapezoid rule on the grid of `curve` and clipped at 0.
/// The output has the same grid as the input.
CcdfCurve apply_td(const CcdfCurve& curve, const JobSizeLaw& law, const ModelParams& p);

/// As above but on an explicitly requested output grid; throws
/// std::invalid_argument if (h, n) does not match the input curve.
CcdfCurve apply_td(const CcdfCurve& curve, const JobSizeLaw& law, const ModelParams& p, double h,
                   std::size_t n);

struct StationaryOptions {
  double h = 0.0;            ///< grid step; 0 means 1e-3 * E[G]
  double tol = 1e-8;         ///< stop when d_K of successive iterates < tol
  int max_iter = 20000;
  double tail_eps = 1e-10;   ///< grow smax until the iterate is below this at smax
  double smax_initial = 0.0; ///< 0 means 16 * E[G]
  double smax_cap = 0.0;     ///< 0 means 200 * E[G]
};

struct FixedPointReport {
  int iterations = 0;
  double final_dk = 0.0;
  std::vector<double> dk_history;              ///< d_K(F_{n+1}, F_n), n = 0, 1, ...
  std::vector<double> contraction_estimates;   ///< dk_history[n] / dk_history[n-1]
  bool converged = false;
  double contraction_bound = 0.0;              ///< d * rho^d
  bool unproven_regime = false;                ///< contraction_bound >= 1
  double a_posteriori_bound = -1.0;            ///< d_K(F*, F_n) bound, -1 when unproven
  double smax = 0.0;
  double tail_value = 0.0;                     ///< ccdf at smax of the final iterate
  bool smax_capped = false;                    ///< tail_eps not reached by smax_cap
};

struct StationarySolution {
  CcdfCurve curve;
  FixedPointReport report;
};

/// Fixed-point iteration F_{n+1} = T_d F_n from the empty start
/// (Fbar_0(0) = rho, 0 elsewhere). Non-convergence within max_iter is
/// reported, not thrown. Throws std::invalid_argument for rho >= 1.
StationarySolution solve_stationary(const JobSizeLaw& law, const ModelParams& p,
                                    const StationaryOptions& opt = {});

/// FCFS response-time ccdf P(V + G > s) where V has ccdf Fbar^d and is
/// independent of the job size G. Same grid as the workload curve.
CcdfCurve response_ccdf(const CcdfCurve& workload, const JobSizeLaw& law, int d);

/// sup_s |f(s) - lambda [(1 - Fbar(0)^d) Gbar(s) + int_0^s c(u) Gbar(s-u) du]|
/// with c = -d/du Fbar^d: the balance of up- and downcrossings of level s.
double level_crossing_residual(const CcdfCurve& workload, const JobSizeLaw& law,
                               const ModelParams& p);

}  // namespace llmf
