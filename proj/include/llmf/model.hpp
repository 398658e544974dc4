#pragma once

#include "llmf/jobsize.hpp"

namespace llmf {

/// Per-server arrival rate lambda, number of sampled servers d, and the load
/// rho = lambda * E[G].
struct ModelParams {
  double lambda = 0.0;
  int d = 2;
  double rho = 0.0;

  /// Exponential unit-mean jobs: rho = lambda. Throws std::invalid_argument
  /// unless 0 <= rho < 1 and d >= 2.
  static ModelParams exponential(double lambda, int d);
  /// rho = lambda * law.mean(), same validation.
  static ModelParams for_law(double lambda, int d, const JobSizeLaw& law);
};

}  // namespace llmf
