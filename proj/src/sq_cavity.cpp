#include "llmf/sq_cavity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace llmf {

std::vector<double> QueueLenDist::tails() const {
  std::vector<double> t(probs.size() + 1, 0.0);
  for (std::size_t n = probs.size(); n-- > 0;) t[n] = t[n + 1] + probs[n];
  return t;
}

double QueueLenDist::mean() const {
  double m = 0.0;
  for (std::size_t n = 1; n < probs.size(); ++n) m += static_cast<double>(n) * probs[n];
  return m;
}

std::vector<double> arrival_rates(const QueueLenDist& env, const ModelParams& p) {
  const auto tb = env.tails();
  const std::size_t levels = env.probs.size();
  std::vector<double> rates(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    const double a = std::min(1.0, tb[n]);
    const double b = std::min(a, tb[n + 1]);
    double sum = 0.0;
    double term = std::pow(b, p.d - 1);  // a^0 b^{d-1}
    for (int j = 0; j < p.d; ++j) {
      sum += term;
      term = b > 0.0 ? term * a / b : (j + 1 == p.d - 1 ? std::pow(a, p.d - 1) : 0.0);
    }
    rates[n] = p.lambda * sum;
  }
  return rates;
}

QueueLenDist solve_m_ph_1_level_dep(const PhRep& ph, const std::vector<double>& rates,
                                    std::size_t L) {
  if (L == 0) return QueueLenDist::empty_system();
  if (rates.size() < L) throw std::invalid_argument("solve_m_ph_1_level_dep: too few rates");
  const int m = ph.phases();
  const Eigen::MatrixXd& a = ph.A;
  const Eigen::VectorXd t = ph.exit_rates();
  const Eigen::MatrixXd t_alpha = t * ph.alpha;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);

  // r[n] maps the level-n vector to level n + 1: pi_{n+1} = pi_n r[n].
  // Level 0 is the single empty state, so r[0] is 1 x m.
  std::vector<Eigen::MatrixXd> r(L);
  Eigen::MatrixXd minus_d = -a;  // -D_L: no arrivals at the top level
  for (std::size_t n = L; n >= 1; --n) {
    const Eigen::MatrixXd up =
        n - 1 == 0 ? Eigen::MatrixXd(rates[0] * ph.alpha) : Eigen::MatrixXd(rates[n - 1] * eye);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(minus_d.transpose());
    r[n - 1] = lu.solve(up.transpose()).transpose();
    if (!r[n - 1].allFinite()) throw std::runtime_error("solve_m_ph_1_level_dep: singular level");
    if (n - 1 >= 1) minus_d = -(a - rates[n - 1] * eye) - r[n - 1] * t_alpha;
  }

  QueueLenDist out;
  out.probs.assign(L + 1, 0.0);
  out.probs[0] = 1.0;
  Eigen::RowVectorXd v = r[0];
  double total = 1.0;
  for (std::size_t n = 1; n <= L; ++n) {
    if (n > 1) v = v * r[n - 1];
    v = v.cwiseMax(0.0);
    out.probs[n] = v.sum();
    total += out.probs[n];
  }
  for (double& x : out.probs) x /= total;
  return out;
}

SqCavitySolution solve_sq_cavity(const JobSizeLaw& law, const ModelParams& p,
                                 const SqCavityOptions& opt) {
  if (!(p.rho < 1.0)) throw std::invalid_argument("rho >= 1: the system is unstable");
  SqCavitySolution sol;
  PhRep ph;
  if (law.is<Deterministic>()) {
    const int k = std::max(1, opt.erlang_order);
    ph = as_ph(JobSizeLaw(ErlangK{k, k / law.as<Deterministic>().c}));
    sol.report.erlang_order = k;
  } else {
    ph = as_ph(law);
  }

  std::size_t level = std::max<std::size_t>(1, opt.initial_level);
  QueueLenDist env = QueueLenDist::empty_system();
  std::vector<double> old_tails = env.tails();
  for (int it = 0; it < opt.max_iter; ++it) {
    // Levels above the environment's support get rate 0.
    auto rates = arrival_rates(env, p);
    rates.resize(level + 1, 0.0);
    QueueLenDist next = solve_m_ph_1_level_dep(ph, rates, level);
    while (next.probs.back() > opt.tail_eps) {
      if (level * 2 > opt.max_level) {
        throw std::runtime_error("solve_sq_cavity: truncation level exceeds max_level");
      }
      level *= 2;
      rates = arrival_rates(env, p);
      rates.resize(level + 1, 0.0);
      next = solve_m_ph_1_level_dep(ph, rates, level);
    }
    // Trim the numerically empty top so later rate vectors stay short.
    std::size_t last = next.probs.size();
    while (last > 1 && next.probs[last - 1] == 0.0) --last;
    next.probs.resize(last);

    const auto tails = next.tails();
    double dk = 0.0;
    for (std::size_t n = 0; n < std::max(tails.size(), old_tails.size()); ++n) {
      const double x = n < tails.size() ? tails[n] : 0.0;
      const double y = n < old_tails.size() ? old_tails[n] : 0.0;
      dk = std::max(dk, std::abs(x - y));
    }
    env = std::move(next);
    old_tails = tails;
    sol.report.iterations = it + 1;
    sol.report.final_dk = dk;
    if (dk < opt.tol) {
      sol.report.converged = true;
      break;
    }
  }
  sol.report.level = level;
  sol.report.mean_queue = env.mean();
  sol.report.mean_response = sq_mean_response(env, p);
  sol.dist = std::move(env);
  return sol;
}

double sq_mean_response(const QueueLenDist& dist, const ModelParams& p) {
  if (p.lambda <= 0.0) return 0.0;
  return dist.mean() / p.lambda;
}

void write_csv(std::ostream& os, const QueueLenDist& dist) {
  os << "n,prob\n" << std::setprecision(17);
  for (std::size_t n = 0; n < dist.probs.size(); ++n) os << n << ',' << dist.probs[n] << '\n';
}

}  // namespace llmf
