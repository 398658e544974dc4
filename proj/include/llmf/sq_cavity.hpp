#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "llmf/jobsize.hpp"
#include "llmf/model.hpp"

namespace llmf {

/// Queue-length distribution pi_0 .. pi_L of one server.
struct QueueLenDist {
  std::vector<double> probs;

  std::size_t level() const { return probs.empty() ? 0 : probs.size() - 1; }
  /// tails[n] = P(Q >= n), n = 0 .. L + 1 (the last entry is 0).
  std::vector<double> tails() const;
  double mean() const;

  static QueueLenDist empty_system() { return QueueLenDist{{1.0}}; }
};

/// Join rate seen by a queue of length n when each potential arrival
/// (rate lambda * d per queue) samples d - 1 other queues from env and ties
/// are broken uniformly:
///   lambda_n = lambda * (tb_n^d - tb_{n+1}^d) / (tb_n - tb_{n+1}),
/// written as lambda * sum_j tb_n^j tb_{n+1}^{d-1-j} so that pi_n = 0 needs
/// no special case. Returns L + 1 rates.
std::vector<double> arrival_rates(const QueueLenDist& env, const ModelParams& p);

/// Stationary queue length of the FCFS M/PH/1 queue whose arrival rate in
/// level n is rates[n], truncated at level L (arrivals at L are lost). Solved
/// by linear level reduction with matrices R_n, pi_{n+1} = pi_n R_n.
/// rates.size() must be at least L.
QueueLenDist solve_m_ph_1_level_dep(const PhRep& ph, const std::vector<double>& rates,
                                    std::size_t L);

struct SqCavityOptions {
  double tol = 1e-12;             ///< sup-norm change of the tails between iterates
  int max_iter = 200000;
  std::size_t initial_level = 64;
  std::size_t max_level = 1 << 16;
  double tail_eps = 1e-12;        ///< double L while pi_L exceeds this
  int erlang_order = 64;          ///< stand-in order for deterministic jobs
};

struct SqCavityReport {
  int iterations = 0;
  double final_dk = 0.0;
  bool converged = false;
  std::size_t level = 0;
  double mean_queue = 0.0;
  double mean_response = 0.0;
  int erlang_order = 0;           ///< nonzero when deterministic jobs were replaced
};

struct SqCavitySolution {
  QueueLenDist dist;
  SqCavityReport report;
};

/// Iterates env -> arrival_rates -> queue solve from the empty system until
/// the tails settle. Deterministic jobs are replaced by an Erlang law of
/// order opt.erlang_order with the same mean. Throws std::invalid_argument
/// for rho >= 1 or laws without a finite PH form (other than Deterministic),
/// and std::runtime_error if the truncation level would exceed max_level.
SqCavitySolution solve_sq_cavity(const JobSizeLaw& law, const ModelParams& p,
                                 const SqCavityOptions& opt = {});

/// Little's law on the cavity queue: E[Q] / lambda.
double sq_mean_response(const QueueLenDist& dist, const ModelParams& p);

/// CSV "n,prob".
void write_csv(std::ostream& os, const QueueLenDist& dist);

}  // namespace llmf
