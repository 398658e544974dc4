#include "llmf/transient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ipow.hpp"
#include "llmf/convolution.hpp"

namespace llmf {

struct TransientSolver::Impl {
  std::vector<double> size_mass;  // P(G in cell j), cell 0 empty
  std::unique_ptr<CausalConvolver> conv;
  std::vector<double> join;       // join probability per cell, index 0 = atom
  std::vector<double> gained;
  std::vector<double> above_pow;
};

TransientSolver::TransientSolver(const JobSizeLaw& law, const ModelParams& p, double h, double dt,
                                 double smax)
    : p_(p), h_(h), impl_(std::make_unique<Impl>()) {
  if (!(h > 0.0)) throw std::invalid_argument("transient: h must be positive");
  if (std::abs(dt - h) > 1e-12 * h) {
    throw std::invalid_argument("transient: the scheme requires dt == h");
  }
  if (!(p.rho < 1.0)) throw std::invalid_argument("rho >= 1: the system is unstable");
  if (!(smax > h)) throw std::invalid_argument("transient: smax must exceed h");
  const auto n = static_cast<std::size_t>(std::llround(smax / h)) + 1;
  mass_.assign(n, 0.0);
  auto& g = impl_->size_mass;
  g.assign(n, 0.0);
  // Job sizes below 3h/2 land in cell 1.
  double prev = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double edge = law.cdf((static_cast<double>(j) + 0.5) * h);
    g[j] = std::max(0.0, edge - prev);
    prev = edge;
  }
  // Thousands of steps reuse this transform, so a measured plan pays off.
  impl_->conv = std::make_unique<CausalConvolver>(g, n, /*measure_plan=*/true);
  impl_->join.assign(n, 0.0);
  impl_->gained.assign(n, 0.0);
  impl_->above_pow.assign(n, 0.0);
}

TransientSolver::~TransientSolver() = default;

double TransientSolver::total_mass() const {
  double m = atom_;
  for (std::size_t i = 1; i < mass_.size(); ++i) m += mass_[i];
  return m;
}

void TransientSolver::step() {
  const std::size_t n = mass_.size();
  const int d = p_.d;
  auto& join = impl_->join;
  // d-th power of the tail above the upper edge of each cell.
  auto& above = impl_->above_pow;
  double tail = 0.0;
  above[n - 1] = 0.0;
  for (std::size_t i = n - 1; i >= 1; --i) {
    tail += mass_[i];
    above[i - 1] = detail::ipow(tail, d);
  }
  join[0] = (1.0 - above[0]) / d;
  for (std::size_t i = 1; i < n; ++i) join[i] = (above[i - 1] - above[i]) / d;
  impl_->conv->apply(join, impl_->gained);
  const double rate = p_.lambda * d * h_;
  const double drained = mass_.size() > 1 ? mass_[1] : 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double shifted = k + 1 < n ? mass_[k + 1] : 0.0;
    mass_[k] = std::max(0.0, shifted + rate * (impl_->gained[k] - join[k]));
  }
  atom_ = atom_ + drained - rate * join[0];
  time_ += h_;
}

CcdfCurve TransientSolver::ccdf() const {
  const std::size_t n = mass_.size();
  CcdfCurve c(h_, std::vector<double>(n, 0.0));
  double above = 0.0;
  for (std::size_t i = n - 1; i >= 1; --i) {
    c.values[i] = above + 0.5 * mass_[i];
    above += mass_[i];
  }
  c.values[0] = 1.0 - atom_;
  return c;
}

TransientResult evolve_transient(const JobSizeLaw& law, const ModelParams& p, double h, double dt,
                                 double smax, const std::vector<double>& stamps) {
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    if (!(stamps[i] >= 0.0)) throw std::invalid_argument("transient: time stamps must be >= 0");
    if (i > 0 && stamps[i] < stamps[i - 1]) {
      throw std::invalid_argument("transient: time stamps must be sorted");
    }
  }
  TransientSolver solver(law, p, h, dt, smax);
  TransientResult out;
  long long steps_done = 0;
  for (double t : stamps) {
    const long long target = std::llround(t / dt);
    while (steps_done < target) {
      solver.step();
      ++steps_done;
      out.max_mass_error = std::max(out.max_mass_error, std::abs(solver.total_mass() - 1.0));
    }
    out.times.push_back(solver.time());
    out.curves.push_back(solver.ccdf());
  }
  return out;
}

}  // namespace llmf
