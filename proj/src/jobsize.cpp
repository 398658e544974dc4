#include "llmf/jobsize.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace llmf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double exp_draw(double rate, Rng& rng) { return -std::log(uniform_open01(rng)) / rate; }

// e^{-x} sum_{n<k} x^n / n!, summed in log space so large x and k stay finite.
double erlang_ccdf(int k, double x) {
  if (x <= 0.0) return 1.0;
  const double logx = std::log(x);
  double total = 0.0;
  for (int n = 0; n < k; ++n) {
    total += std::exp(-x + n * logx - std::lgamma(n + 1.0));
  }
  return std::min(1.0, total);
}

// Grid points computed as i * h land within rounding of a jump location.
bool on_point(double s, double at) { return std::abs(s - at) <= 1e-9 * std::max(1.0, at); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string describe_ph(const PhRep& ph) {
  std::ostringstream os;
  os.precision(10);
  os << "ph(alpha=[";
  for (int i = 0; i < ph.phases(); ++i) os << (i ? "," : "") << ph.alpha[i];
  os << "],A=[";
  for (int i = 0; i < ph.phases(); ++i) {
    if (i) os << ";";
    for (int j = 0; j < ph.phases(); ++j) os << (j ? "," : "") << ph.A(i, j);
  }
  os << "])";
  return os.str();
}

}  // namespace

double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

PhRep::PhRep(Eigen::RowVectorXd a, Eigen::MatrixXd m) : alpha(std::move(a)), A(std::move(m)) {
  const auto n = alpha.size();
  require(n >= 1, "phase-type: need at least one phase");
  require(A.rows() == n && A.cols() == n, "phase-type: A must be n x n with n = len(alpha)");
  require((alpha.array() >= 0.0).all(), "phase-type: alpha must be nonnegative");
  require(std::abs(alpha.sum() - 1.0) <= 1e-10, "phase-type: alpha must sum to 1");
  bool some_exit = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    require(A(i, i) < 0.0, "phase-type: diagonal of A must be negative");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) require(A(i, j) >= 0.0, "phase-type: off-diagonal of A must be nonnegative");
    }
    const double row = A.row(i).sum();
    require(row <= 1e-12 * std::abs(A(i, i)), "phase-type: row sums of A must be <= 0");
    if (row < 0.0) some_exit = true;
  }
  require(some_exit, "phase-type: absorption must be possible");
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(-A);
  require(lu.isInvertible(), "phase-type: -A must be invertible");
}

Eigen::VectorXd PhRep::exit_rates() const { return -A * Eigen::VectorXd::Ones(phases()); }

double PhRep::mean() const {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(phases());
  return alpha * (-A).partialPivLu().solve(ones);
}

double PhRep::second_moment() const {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(phases());
  const auto lu = (-A).partialPivLu();
  return 2.0 * (alpha * lu.solve(lu.solve(ones)))(0);
}

double PhRep::ccdf(double s) const {
  if (s <= 0.0) return 1.0;
  const Eigen::MatrixXd e = (A * s).exp();
  const double v = alpha * e * Eigen::VectorXd::Ones(phases());
  return std::clamp(v, 0.0, 1.0);
}

double PhRep::pdf(double s) const {
  if (s < 0.0) return 0.0;
  const Eigen::MatrixXd e = (A * s).exp();
  return std::max(0.0, (alpha * e * exit_rates())(0));
}

double PhRep::sample(Rng& rng) const {
  const int n = phases();
  double u = uniform_open01(rng);
  int phase = n - 1;
  for (int i = 0; i < n; ++i) {
    if (u < alpha[i]) {
      phase = i;
      break;
    }
    u -= alpha[i];
  }
  double t = 0.0;
  for (;;) {
    const double out = -A(phase, phase);
    t += exp_draw(out, rng);
    double v = uniform_open01(rng) * out;
    int next = -1;
    for (int j = 0; j < n; ++j) {
      if (j == phase) continue;
      if (v < A(phase, j)) {
        next = j;
        break;
      }
      v -= A(phase, j);
    }
    if (next < 0) return t;
    phase = next;
  }
}

JobSizeLaw::JobSizeLaw(Exponential v) : law_(v) {
  require(v.rate > 0.0 && std::isfinite(v.rate), "exp: rate must be positive");
}
JobSizeLaw::JobSizeLaw(HyperExp2 v) : law_(v) {
  require(v.p > 0.0 && v.p < 1.0, "hexp: p must lie in (0,1)");
  require(v.mu1 > 0.0 && v.mu2 > 0.0, "hexp: rates must be positive");
}
JobSizeLaw::JobSizeLaw(ErlangK v) : law_(v) {
  require(v.k >= 1, "erlang: k must be >= 1");
  require(v.rate > 0.0, "erlang: rate must be positive");
}
JobSizeLaw::JobSizeLaw(Deterministic v) : law_(v) {
  require(v.c > 0.0 && std::isfinite(v.c), "det: c must be positive");
}
JobSizeLaw::JobSizeLaw(PowerLaw v) : law_(v) {
  require(v.beta > 1.0, "powerlaw: beta must exceed 1 for a finite mean");
  require(v.smin > 0.0, "powerlaw: smin must be positive");
}
JobSizeLaw::JobSizeLaw(PhaseType v) : law_(std::move(v)) {}
JobSizeLaw::JobSizeLaw(DetPlusPh v) {
  require(v.tau >= 0.0 && std::isfinite(v.tau), "detph: tau must be >= 0");
  law_ = std::move(v);
}

double JobSizeLaw::ccdf(double s) const {
  if (s < 0.0) return 1.0;
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return std::exp(-e.rate * s); },
          [&](const HyperExp2& h) {
            return h.p * std::exp(-h.mu1 * s) + (1.0 - h.p) * std::exp(-h.mu2 * s);
          },
          [&](const ErlangK& e) { return erlang_ccdf(e.k, e.rate * s); },
          [&](const Deterministic& d) { return s < d.c ? 1.0 : 0.0; },
          [&](const PowerLaw& p) { return s <= p.smin ? 1.0 : std::pow(s / p.smin, -p.beta); },
          [&](const PhaseType& p) { return p.ph.ccdf(s); },
          [&](const DetPlusPh& p) { return s <= p.tau ? 1.0 : p.ph.ccdf(s - p.tau); },
      },
      law_);
}

double JobSizeLaw::ccdf_left(double s) const {
  if (const auto* d = std::get_if<Deterministic>(&law_)) return s <= d->c ? 1.0 : 0.0;
  return ccdf(s);
}

double JobSizeLaw::pdf(double s) const {
  if (s < 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return e.rate * std::exp(-e.rate * s); },
          [&](const HyperExp2& h) {
            return h.p * h.mu1 * std::exp(-h.mu1 * s) +
                   (1.0 - h.p) * h.mu2 * std::exp(-h.mu2 * s);
          },
          [&](const ErlangK& e) {
            if (s == 0.0) return e.k == 1 ? e.rate : 0.0;
            const double x = e.rate * s;
            return e.rate * std::exp(-x + (e.k - 1) * std::log(x) - std::lgamma(e.k));
          },
          [&](const Deterministic&) { return 0.0; },
          [&](const PowerLaw& p) {
            return s < p.smin ? 0.0 : p.beta / p.smin * std::pow(s / p.smin, -p.beta - 1.0);
          },
          [&](const PhaseType& p) { return p.ph.pdf(s); },
          [&](const DetPlusPh& p) { return s < p.tau ? 0.0 : p.ph.pdf(s - p.tau); },
      },
      law_);
}

double JobSizeLaw::ccdf_mid(double s) const {
  if (const auto* d = std::get_if<Deterministic>(&law_); d && on_point(s, d->c)) return 0.5;
  return ccdf(s);
}

double JobSizeLaw::pdf_mid(double s) const {
  if (const auto* p = std::get_if<PowerLaw>(&law_); p && on_point(s, p->smin)) {
    return 0.5 * pdf(p->smin);
  }
  if (const auto* p = std::get_if<DetPlusPh>(&law_); p && p->tau > 0.0 && on_point(s, p->tau)) {
    return 0.5 * pdf(p->tau);
  }
  return pdf(s);
}

double JobSizeLaw::mean() const {
  return std::visit(
      Overloaded{
          [](const Exponential& e) { return 1.0 / e.rate; },
          [](const HyperExp2& h) { return h.p / h.mu1 + (1.0 - h.p) / h.mu2; },
          [](const ErlangK& e) { return e.k / e.rate; },
          [](const Deterministic& d) { return d.c; },
          [](const PowerLaw& p) { return p.beta * p.smin / (p.beta - 1.0); },
          [](const PhaseType& p) { return p.ph.mean(); },
          [](const DetPlusPh& p) { return p.tau + p.ph.mean(); },
      },
      law_);
}

double JobSizeLaw::second_moment() const {
  return std::visit(
      Overloaded{
          [](const Exponential& e) { return 2.0 / (e.rate * e.rate); },
          [](const HyperExp2& h) {
            return 2.0 * h.p / (h.mu1 * h.mu1) + 2.0 * (1.0 - h.p) / (h.mu2 * h.mu2);
          },
          [](const ErlangK& e) { return e.k * (e.k + 1.0) / (e.rate * e.rate); },
          [](const Deterministic& d) { return d.c * d.c; },
          [](const PowerLaw& p) {
            if (p.beta <= 2.0) return std::numeric_limits<double>::infinity();
            return p.beta * p.smin * p.smin / (p.beta - 2.0);
          },
          [](const PhaseType& p) { return p.ph.second_moment(); },
          [](const DetPlusPh& p) {
            return p.tau * p.tau + 2.0 * p.tau * p.ph.mean() + p.ph.second_moment();
          },
      },
      law_);
}

double JobSizeLaw::scv() const {
  const double m = mean();
  return second_moment() / (m * m) - 1.0;
}

double JobSizeLaw::sample(Rng& rng) const {
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return exp_draw(e.rate, rng); },
          [&](const HyperExp2& h) {
            return uniform_open01(rng) < h.p ? exp_draw(h.mu1, rng) : exp_draw(h.mu2, rng);
          },
          [&](const ErlangK& e) {
            double t = 0.0;
            for (int i = 0; i < e.k; ++i) t += exp_draw(e.rate, rng);
            return t;
          },
          [&](const Deterministic& d) { return d.c; },
          [&](const PowerLaw& p) { return p.smin * std::pow(uniform_open01(rng), -1.0 / p.beta); },
          [&](const PhaseType& p) { return p.ph.sample(rng); },
          [&](const DetPlusPh& p) { return p.tau + p.ph.sample(rng); },
      },
      law_);
}

std::string JobSizeLaw::describe() const {
  return std::visit(
      Overloaded{
          [](const Exponential& e) { return "exp(rate=" + fmt_num(e.rate) + ")"; },
          [](const HyperExp2& h) {
            return "hexp(p=" + fmt_num(h.p) + ",mu1=" + fmt_num(h.mu1) + ",mu2=" + fmt_num(h.mu2) +
                   ")";
          },
          [](const ErlangK& e) {
            return "erlang(k=" + std::to_string(e.k) + ",rate=" + fmt_num(e.rate) + ")";
          },
          [](const Deterministic& d) { return "det(c=" + fmt_num(d.c) + ")"; },
          [](const PowerLaw& p) {
            return "powerlaw(beta=" + fmt_num(p.beta) + ",smin=" + fmt_num(p.smin) + ")";
          },
          [](const PhaseType& p) { return describe_ph(p.ph); },
          [](const DetPlusPh& p) {
            return "detph(tau=" + fmt_num(p.tau) + ",inner=" + describe_ph(p.ph) + ")";
          },
      },
      law_);
}

JobSizeLaw fit_hyperexp(const HexpFitSpec& spec) {
  require(spec.scv >= 1.0, "hexp fit: scv must be >= 1");
  require(spec.f > 0.0 && spec.f < 1.0, "hexp fit: f must lie in (0,1)");
  require(spec.mean > 0.0, "hexp fit: mean must be positive");
  const double scv = spec.scv;
  const double f = spec.f;
  const double fbar = 1.0 - f;
  const double root = std::sqrt((scv - 1.0) * (scv - 1.0 + 8.0 * f * fbar));
  const double mu1 = (scv + (4.0 * f - 1.0) + root) / (2.0 * f * (scv + 1.0));
  const double mu2 = (scv + (4.0 * fbar - 1.0) - root) / (2.0 * fbar * (scv + 1.0));
  const double p = mu1 * f;
  // Unit-mean fit, then rescale time by the requested mean.
  return JobSizeLaw(HyperExp2{p, mu1 / spec.mean, mu2 / spec.mean});
}

PhRep as_ph(const JobSizeLaw& law) {
  return std::visit(
      Overloaded{
          [](const Exponential& e) {
            return PhRep(Eigen::RowVectorXd::Ones(1), Eigen::MatrixXd::Constant(1, 1, -e.rate));
          },
          [](const HyperExp2& h) {
            Eigen::RowVectorXd a(2);
            a << h.p, 1.0 - h.p;
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
            m(0, 0) = -h.mu1;
            m(1, 1) = -h.mu2;
            return PhRep(a, m);
          },
          [](const ErlangK& e) {
            Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(e.k);
            a[0] = 1.0;
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(e.k, e.k);
            for (int i = 0; i < e.k; ++i) {
              m(i, i) = -e.rate;
              if (i + 1 < e.k) m(i, i + 1) = e.rate;
            }
            return PhRep(a, m);
          },
          [](const PhaseType& p) { return p.ph; },
          [](const auto&) -> PhRep {
            throw std::invalid_argument("law has no finite phase-type representation");
          },
      },
      law.variant());
}

bool has_ph(const JobSizeLaw& law) {
  return law.is<Exponential>() || law.is<HyperExp2>() || law.is<ErlangK>() || law.is<PhaseType>();
}

}  // namespace llmf
