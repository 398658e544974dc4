#pragma once

#include "llmf/curve.hpp"
#include "llmf/jobsize.hpp"
#include "llmf/model.hpp"

// Stationary LL(d) workload ccdf from ODE / delay-ODE systems. Only
// lambda and d are read from ModelParams; the load is recomputed from the
// job-size law.

namespace llmf {

struct OdeOptions {
  double h_step = 1e-3;
  double smax = 0.0;       ///< 0: integrate until the ccdf drops below tail_eps
  double tail_eps = 1e-10;
  double smax_cap = 0.0;   ///< 0 means 200 * E[G]; only used when smax == 0
};

/// Fbar' = -lambda((1 - Fbar^d) + alpha A h), h' = (1 - Fbar^d) 1 + A h,
/// Fbar(0) = rho, h(0) = 0, by fixed-step RK4.
/// Throws std::invalid_argument for rho >= 1 and std::runtime_error when the
/// step is too coarse to keep the ccdf monotone.
CcdfCurve solve_ph(const PhRep& ph, const ModelParams& p, const OdeOptions& opt = {});

/// Jobs of size tau + PH: Fbar' = lambda(Fbar^d - 1) for s <= tau and
/// Fbar' = -lambda((1 - Fbar^d) + alpha A h(s - tau)) beyond, with the same
/// h equation. tau is rounded to a whole number of steps (see grid_delay).
CcdfCurve solve_det_plus_ph(double tau, const PhRep& ph, const ModelParams& p,
                            const OdeOptions& opt = {});

/// Jobs of size c: Fbar' = lambda(Fbar^d - 1) on [0, c) and
/// Fbar' = lambda(Fbar^d - Fbar(s - c)^d) beyond; Fbar(0) = lambda c.
CcdfCurve solve_det(const ModelParams& p, const OdeOptions& opt = {}, double c = 1.0);

/// Delay rounded to the nearest multiple of h.
double grid_delay(double delay, double h);

/// Dispatches on the law: Deterministic, DetPlusPh, or anything with a
/// phase-type representation. Throws std::invalid_argument otherwise.
CcdfCurve solve_workload_ode(const JobSizeLaw& law, const ModelParams& p,
                             const OdeOptions& opt = {});

struct MeanEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  ///< curve(smax) * smax
};

/// Trapezoid integral of the ccdf over the grid.
MeanEstimate mean_from_curve(const CcdfCurve& curve);

}  // namespace llmf
