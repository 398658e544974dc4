#include "llmf/model.hpp"

#include <cmath>
#include <stdexcept>

namespace llmf {

namespace {

ModelParams make(double lambda, int d, double rho) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (!(rho < 1.0)) throw std::invalid_argument("rho >= 1: the system is unstable");
  return ModelParams{lambda, d, rho};
}

}  // namespace

ModelParams ModelParams::exponential(double lambda, int d) { return make(lambda, d, lambda); }

ModelParams ModelParams::for_law(double lambda, int d, const JobSizeLaw& law) {
  return make(lambda, d, lambda * law.mean());
}

}  // namespace llmf
