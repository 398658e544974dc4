#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "llmf/curve.hpp"
#include "llmf/jobsize.hpp"

namespace llmf {

enum class Policy { LL, SQ };

struct SimConfig {
  int N = 100;
  double lambda = 0.9;
  int d = 2;
  Policy policy = Policy::LL;
  JobSizeLaw law;
  double overhead_tau = 0.0;  ///< added to every job size under LL
  double horizon = 0.0;       ///< 0 means 1e7 / N
  double warmup_frac = 0.3;
  int runs = 10;
  std::uint64_t seed = 1;
  double ccdf_h = 0.01;       ///< grid of the empirical response ccdf
  double ccdf_smax = 30.0;
  int threads = 0;            ///< 0: hardware concurrency

  double effective_horizon() const { return horizon > 0.0 ? horizon : 1e7 / N; }
  /// Throws std::invalid_argument on an invalid configuration.
  void validate() const;
};

/// Server states for FCFS servers: the time each server next becomes idle,
/// plus (for queue lengths) the completion times of the jobs it holds.
class ClusterState {
 public:
  ClusterState(int n, bool track_queues);

  int size() const { return static_cast<int>(busy_until_.size()); }
  double workload(int j, double t) const;
  /// Jobs at server j at time t (drops completed jobs).
  std::size_t queue_length(int j, double t);
  /// Appends a job of the given size at time t; returns its response time.
  double admit(int j, double t, double size);

 private:
  std::vector<double> busy_until_;
  std::vector<std::deque<double>> completions_;
  bool track_queues_;
};

/// Picks among the sampled servers (with repetitions) the one with the
/// smallest workload (LL) or queue length (SQ); ties among distinct servers
/// are broken by one uniform draw from rng.
int choose_server(Policy policy, ClusterState& state, double t, std::span<const int> sampled,
                  Rng& rng);

/// Seed of replication run_index, derived with splitmix64 from the base seed.
std::uint64_t run_seed(std::uint64_t seed, int run_index);

struct RunRecord {
  double mean_response = 0.0;
  std::uint64_t jobs_counted = 0;
  std::uint64_t jobs_warmup = 0;
  /// hist[k] counts responses in (k h, (k+1) h]; the last entry collects
  /// everything above the grid.
  std::vector<std::uint64_t> hist;
};

RunRecord run_once(const SimConfig& cfg, int run_index);

struct SimSummary {
  double mean_response = 0.0;
  double ci_halfwidth = 0.0;  ///< 95% Student-t over runs; +inf for one run
  CcdfCurve empirical_ccdf;   ///< pooled over runs
  std::uint64_t jobs_counted = 0;
  std::uint64_t jobs_warmup = 0;
  std::vector<double> per_run_means;
};

/// Runs cfg.runs replications in parallel and reduces them in run order.
SimSummary run_replicated(const SimConfig& cfg);

/// Fraction of samples strictly above each grid point s_i = i h, i < n.
/// Throws std::invalid_argument for an empty sample.
CcdfCurve empirical_response_ccdf(std::vector<double> samples, double h, std::size_t n);

/// Writes the "summary" block: mean, ci, runs, seed and job counts.
void write_summary(std::ostream& os, const SimConfig& cfg, const SimSummary& s);

}  // namespace llmf
