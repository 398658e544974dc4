#include "llmf/workload.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "llmf/convolution.hpp"
#include "llmf/kernels.hpp"
#include "ipow.hpp"

namespace llmf {

namespace {

void require_stable(const ModelParams& p) {
  if (!(p.rho < 1.0)) throw std::invalid_argument("rho >= 1: the system is unstable");
  if (p.d < 2) throw std::invalid_argument("d must be >= 2");
}

// T_d on a fixed grid with the kernel transform prepared once.
class TdOperator {
 public:
  TdOperator(const JobSizeLaw& law, const ModelParams& p, double h, std::size_t n)
      : p_(p),
        h_(h),
        kernel_(tabulate_ccdf_mid(law, h, n)),
        kernel_end_(tabulate_ccdf_left(law, h, n)),
        conv_(kernel_, n),
        a_(n),
        tmp_(n) {}

  std::size_t size() const { return conv_.size(); }

  void apply(const std::vector<double>& fbar, std::vector<double>& out) {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) a_[i] = 1.0 - detail::ipow(fbar[i], p_.d);
    trapezoid_convolution(conv_, a_, kernel_, h_, tmp_, kernel_end_);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, p_.rho - p_.lambda * tmp_[i]);
  }

 private:
  ModelParams p_;
  double h_;
  std::vector<double> kernel_;
  std::vector<double> kernel_end_;
  CausalConvolver conv_;
  std::vector<double> a_;
  std::vector<double> tmp_;
};

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::size_t points_for(double smax, double h) {
  return static_cast<std::size_t>(std::llround(smax / h)) + 1;
}

}  // namespace

std::vector<double> density_from_ccdf(const CcdfCurve& curve) {
  const auto& v = curve.values;
  const std::size_t n = v.size();
  std::vector<double> f(n, 0.0);
  if (n < 2) return f;
  const double h = curve.h;
  if (n == 2) {
    f[0] = f[1] = (v[0] - v[1]) / h;
    return f;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) f[i] = (v[i - 1] - v[i + 1]) / (2.0 * h);
  f[0] = (3.0 * v[0] - 4.0 * v[1] + v[2]) / (2.0 * h);
  f[n - 1] = (-3.0 * v[n - 1] + 4.0 * v[n - 2] - v[n - 3]) / (2.0 * h);
  return f;
}

SelectionTerms selection_density_terms(const CcdfCurve& curve, int d) {
  if (d < 1) throw std::invalid_argument("selection_density_terms: d must be >= 1");
  const auto f = density_from_ccdf(curve);
  SelectionTerms t;
  t.c.resize(curve.size());
  t.C.resize(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double fb = curve.values[i];
    t.c[i] = f[i] * detail::ipow(fb, d - 1);
    t.C[i] = (1.0 - detail::ipow(fb, d)) / d;
  }
  return t;
}

CcdfCurve apply_td(const CcdfCurve& curve, const JobSizeLaw& law, const ModelParams& p) {
  return apply_td(curve, law, p, curve.h, curve.size());
}

CcdfCurve apply_td(const CcdfCurve& curve, const JobSizeLaw& law, const ModelParams& p, double h,
                   std::size_t n) {
  if (std::abs(h - curve.h) > 1e-12 * curve.h || n != curve.size()) {
    throw std::invalid_argument("apply_td: output grid does not match the input curve");
  }
  if (n == 0) return CcdfCurve(h, {});
  TdOperator op(law, p, h, n);
  CcdfCurve out(h, {});
  op.apply(curve.values, out.values);
  return out;
}

StationarySolution solve_stationary(const JobSizeLaw& law, const ModelParams& p,
                                    const StationaryOptions& opt) {
  require_stable(p);
  const double mean = law.mean();
  const double h = opt.h > 0.0 ? opt.h : 1e-3 * mean;
  const double cap = opt.smax_cap > 0.0 ? opt.smax_cap : 200.0 * mean;
  double smax = std::min(cap, opt.smax_initial > 0.0 ? opt.smax_initial : 16.0 * mean);

  FixedPointReport rep;
  rep.contraction_bound = p.d * std::pow(p.rho, p.d);
  rep.unproven_regime = rep.contraction_bound >= 1.0;

  std::size_t n = points_for(smax, h);
  auto op = std::make_unique<TdOperator>(law, p, h, n);
  std::vector<double> cur(n, 0.0);
  cur[0] = p.rho;
  std::vector<double> next;

  for (int it = 0; it < opt.max_iter; ++it) {
    op->apply(cur, next);
    // Grow the grid while the new iterate is not negligible at smax. T_d is
    // causal, so recomputing on the longer grid leaves earlier points as they were.
    while (next.back() > opt.tail_eps && smax < cap) {
      smax = std::min(cap, 2.0 * smax);
      n = points_for(smax, h);
      op = std::make_unique<TdOperator>(law, p, h, n);
      cur.resize(n, 0.0);
      op->apply(cur, next);
    }
    const double dk = sup_diff(next, cur);
    if (!rep.dk_history.empty() && rep.dk_history.back() > 0.0) {
      rep.contraction_estimates.push_back(dk / rep.dk_history.back());
    }
    rep.dk_history.push_back(dk);
    cur.swap(next);
    rep.iterations = it + 1;
    rep.final_dk = dk;
    if (dk < opt.tol) {
      rep.converged = true;
      break;
    }
  }

  rep.smax = smax;
  rep.tail_value = cur.back();
  rep.smax_capped = rep.tail_value > opt.tail_eps;
  if (!rep.unproven_regime) {
    const double c = rep.contraction_bound;
    rep.a_posteriori_bound = rep.final_dk * c / (1.0 - c);
  }
  return {CcdfCurve(h, std::move(cur)), std::move(rep)};
}

CcdfCurve response_ccdf(const CcdfCurve& workload, const JobSizeLaw& law, int d) {
  const double h = workload.h;
  const std::size_t n = workload.size();
  std::vector<double> wait(n);
  for (std::size_t i = 0; i < n; ++i) wait[i] = detail::ipow(workload.values[i], d);

  if (law.is<Deterministic>()) {
    const double c = law.as<Deterministic>().c;
    CcdfCurve waiting(h, wait);
    return CcdfCurve::tabulate(h, n, [&](double s) {
      return s < c * (1.0 - 1e-12) ? 1.0 : waiting.at(std::max(0.0, s - c));
    });
  }

  // P(V + X > s) for the absolutely continuous part X, then shifted by any
  // deterministic offset.
  JobSizeLaw inner = law;
  double shift = 0.0;
  if (law.is<DetPlusPh>()) {
    shift = law.as<DetPlusPh>().tau;
    inner = JobSizeLaw(PhaseType{law.as<DetPlusPh>().ph});
  }
  const auto g = tabulate_pdf_mid(inner, h, n);
  const auto gbar = tabulate_ccdf_mid(inner, h, n);
  const auto conv = trapezoid_convolution(wait, g, h, tabulate_pdf_left(inner, h, n));
  CcdfCurve base(h, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) base.values[i] = std::clamp(gbar[i] + conv[i], 0.0, 1.0);
  if (shift <= 0.0) return base;
  return CcdfCurve::tabulate(h, n, [&](double s) {
    return s <= shift ? 1.0 : base.at(s - shift);
  });
}

double level_crossing_residual(const CcdfCurve& workload, const JobSizeLaw& law,
                               const ModelParams& p) {
  const std::size_t n = workload.size();
  if (n < 3) return 0.0;
  const double h = workload.h;
  const auto f = density_from_ccdf(workload);
  CcdfCurve powd(h, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) powd.values[i] = detail::ipow(workload.values[i], p.d);
  const auto c = density_from_ccdf(powd);
  const auto gbar = tabulate_ccdf_mid(law, h, n);
  const auto up = trapezoid_convolution(c, gbar, h, tabulate_ccdf_left(law, h, n));
  const double atom_rate = 1.0 - powd.values[0];
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = f[i] - p.lambda * (atom_rate * gbar[i] + up[i]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace llmf
