#include "llmf/ph_ode.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace llmf {

namespace {

using Vec = Eigen::VectorXd;

// Right-hand side on step interval i at position s_i + frac * h. `delayed`
// is the state at the delayed position, or null before the delay kicks in.
using Rhs = std::function<Vec(std::size_t i, const Vec& y, const Vec* delayed)>;

struct Limits {
  std::size_t max_points = 0;  // hard limit on grid size
  bool stop_on_tail = false;
  double tail_eps = 0.0;
};

// Fixed-step RK4 for y' = rhs(s, y, y(s - K h)). Delayed values between grid
// points come from cubic Hermite interpolation using the stored one-sided
// derivatives, so kinks at grid points do not smear into the interpolant.
CcdfCurve integrate(const Rhs& rhs, Vec y0, double h, std::size_t delay_steps, const Limits& lim) {
  std::vector<Vec> ys{std::move(y0)};
  std::vector<Vec> dright;        // derivative at s_i from the right
  std::vector<Vec> dleft{Vec()};  // derivative at s_i from the left
  std::vector<double> out{ys[0][0]};
  const std::size_t k = delay_steps;

  auto hermite_mid = [&](std::size_t j) -> Vec {
    return 0.5 * (ys[j] + ys[j + 1]) + (h / 8.0) * (dright[j] - dleft[j + 1]);
  };

  for (std::size_t i = 0; i + 1 < lim.max_points; ++i) {
    const Vec& y = ys[i];
    const bool delayed = k > 0 && i >= k;
    Vec d0;
    Vec dmid;
    Vec d1;
    if (delayed) {
      d0 = ys[i - k];
      dmid = hermite_mid(i - k);
      d1 = ys[i - k + 1];
    }
    const Vec* p0 = delayed ? &d0 : nullptr;
    const Vec* pm = delayed ? &dmid : nullptr;
    const Vec* p1 = delayed ? &d1 : nullptr;

    const Vec k1 = rhs(i, y, p0);
    const Vec k2 = rhs(i, y + 0.5 * h * k1, pm);
    const Vec k3 = rhs(i, y + 0.5 * h * k2, pm);
    const Vec k4 = rhs(i, y + h * k3, p1);
    Vec next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (next[0] > y[0] + 1e-9) {
      throw std::runtime_error("ODE ccdf increased at s = " + std::to_string((i + 1) * h) +
                               "; use a smaller step");
    }
    if (next[0] < 0.0) {
      if (next[0] < -1e-12) {
        throw std::runtime_error("ODE ccdf went negative at s = " + std::to_string((i + 1) * h) +
                                 "; use a smaller step");
      }
      next[0] = 0.0;
    }
    dright.push_back(k1);
    dleft.push_back(rhs(i, next, p1));
    out.push_back(next[0]);
    ys.push_back(std::move(next));
    if (lim.stop_on_tail && out.back() < lim.tail_eps && i + 1 > k) break;
  }
  return CcdfCurve(h, std::move(out));
}

Limits limits_for(const OdeOptions& opt, double mean) {
  if (!(opt.h_step > 0.0)) throw std::invalid_argument("ODE step must be positive");
  Limits lim;
  if (opt.smax > 0.0) {
    lim.max_points = static_cast<std::size_t>(std::llround(opt.smax / opt.h_step)) + 1;
  } else {
    const double cap = opt.smax_cap > 0.0 ? opt.smax_cap : 200.0 * mean;
    lim.max_points = static_cast<std::size_t>(std::llround(cap / opt.h_step)) + 1;
    lim.stop_on_tail = true;
    lim.tail_eps = opt.tail_eps;
  }
  return lim;
}

double checked_rho(double lambda, double mean) {
  const double rho = lambda * mean;
  if (!(rho < 1.0)) throw std::invalid_argument("rho >= 1: the system is unstable");
  if (!(rho >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  return rho;
}

}  // namespace

double grid_delay(double delay, double h) { return std::round(delay / h) * h; }

CcdfCurve solve_ph(const PhRep& ph, const ModelParams& p, const OdeOptions& opt) {
  const double mean = ph.mean();
  const double rho = checked_rho(p.lambda, mean);
  const int n = ph.phases();
  const Eigen::RowVectorXd alpha_a = ph.alpha * ph.A;
  const Eigen::MatrixXd& a = ph.A;
  const double lam = p.lambda;
  const int d = p.d;
  Rhs rhs = [&](std::size_t, const Vec& y, const Vec*) {
    const double busy = 1.0 - std::pow(y[0], d);
    const Vec hv = y.tail(n);
    Vec dy(n + 1);
    dy[0] = -lam * (busy + alpha_a.dot(hv));
    dy.tail(n) = Vec::Constant(n, busy) + a * hv;
    return dy;
  };
  Vec y0 = Vec::Zero(n + 1);
  y0[0] = rho;
  return integrate(rhs, y0, opt.h_step, 0, limits_for(opt, mean));
}

CcdfCurve solve_det_plus_ph(double tau, const PhRep& ph, const ModelParams& p,
                            const OdeOptions& opt) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  const double h = opt.h_step;
  const auto k = static_cast<std::size_t>(std::llround(tau / h));
  if (k == 0) return solve_ph(ph, p, opt);
  const double tau_grid = static_cast<double>(k) * h;
  const double mean = tau_grid + ph.mean();
  const double rho = checked_rho(p.lambda, mean);
  const int n = ph.phases();
  const Eigen::RowVectorXd alpha_a = ph.alpha * ph.A;
  const Eigen::MatrixXd& a = ph.A;
  const double lam = p.lambda;
  const int d = p.d;
  Rhs rhs = [&](std::size_t, const Vec& y, const Vec* past) {
    const double busy = 1.0 - std::pow(y[0], d);
    const Vec hv = y.tail(n);
    Vec dy(n + 1);
    dy[0] = past ? -lam * (busy + alpha_a.dot(past->tail(n))) : -lam * busy;
    dy.tail(n) = Vec::Constant(n, busy) + a * hv;
    return dy;
  };
  Vec y0 = Vec::Zero(n + 1);
  y0[0] = rho;
  return integrate(rhs, y0, h, k, limits_for(opt, mean));
}

CcdfCurve solve_det(const ModelParams& p, const OdeOptions& opt, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("deterministic job size must be positive");
  const double h = opt.h_step;
  const auto k = static_cast<std::size_t>(std::llround(c / h));
  if (k == 0) throw std::invalid_argument("ODE step must not exceed the job size");
  const double c_grid = static_cast<double>(k) * h;
  const double rho = checked_rho(p.lambda, c_grid);
  const double lam = p.lambda;
  const int d = p.d;
  Rhs rhs = [&](std::size_t, const Vec& y, const Vec* past) {
    Vec dy(1);
    const double inflow = past ? std::pow((*past)[0], d) : 1.0;
    dy[0] = lam * (std::pow(y[0], d) - inflow);
    return dy;
  };
  Vec y0(1);
  y0[0] = rho;
  return integrate(rhs, y0, h, k, limits_for(opt, c_grid));
}

CcdfCurve solve_workload_ode(const JobSizeLaw& law, const ModelParams& p, const OdeOptions& opt) {
  if (law.is<Deterministic>()) return solve_det(p, opt, law.as<Deterministic>().c);
  if (law.is<DetPlusPh>()) {
    const auto& v = law.as<DetPlusPh>();
    return solve_det_plus_ph(v.tau, v.ph, p, opt);
  }
  return solve_ph(as_ph(law), p, opt);
}

MeanEstimate mean_from_curve(const CcdfCurve& curve) {
  MeanEstimate m;
  const std::size_t n = curve.size();
  if (n == 0) return m;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    sum += w * curve.values[i];
  }
  m.value = curve.h * sum;
  m.tail_bound = curve.values.back() * curve.smax();
  return m;
}

}  // namespace llmf
