#include "llmf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace llmf {

void SimConfig::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(warmup_frac >= 0.0 && warmup_frac < 1.0)) {
    throw std::invalid_argument("warmup_frac must be in [0, 1)");
  }
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (!(overhead_tau >= 0.0)) throw std::invalid_argument("overhead_tau must be >= 0");
  if (!(effective_horizon() > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(ccdf_h > 0.0 && ccdf_smax > ccdf_h)) throw std::invalid_argument("bad ccdf grid");
}

ClusterState::ClusterState(int n, bool track_queues)
    : busy_until_(static_cast<std::size_t>(n), 0.0), track_queues_(track_queues) {
  if (track_queues_) completions_.resize(static_cast<std::size_t>(n));
}

double ClusterState::workload(int j, double t) const {
  return std::max(0.0, busy_until_[static_cast<std::size_t>(j)] - t);
}

std::size_t ClusterState::queue_length(int j, double t) {
  auto& q = completions_.at(static_cast<std::size_t>(j));
  while (!q.empty() && q.front() <= t) q.pop_front();
  return q.size();
}

double ClusterState::admit(int j, double t, double size) {
  auto& b = busy_until_[static_cast<std::size_t>(j)];
  const double response = std::max(0.0, b - t) + size;
  b = t + response;
  if (track_queues_) {
    auto& q = completions_[static_cast<std::size_t>(j)];
    while (!q.empty() && q.front() <= t) q.pop_front();
    q.push_back(b);
  }
  return response;
}

int choose_server(Policy policy, ClusterState& state, double t, std::span<const int> sampled,
                  Rng& rng) {
  if (sampled.empty()) throw std::invalid_argument("choose_server: no servers sampled");
  // Small d: linear scans beat any container.
  int tied[64];
  int ntied = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int j : sampled) {
    const double key = policy == Policy::LL ? state.workload(j, t)
                                            : static_cast<double>(state.queue_length(j, t));
    if (key < best) {
      best = key;
      ntied = 0;
    }
    if (key == best && std::find(tied, tied + ntied, j) == tied + ntied && ntied < 64) {
      tied[ntied++] = j;
    }
  }
  if (ntied == 1) return tied[0];
  const auto pick = static_cast<int>(uniform_open01(rng) * ntied);
  return tied[std::min(pick, ntied - 1)];
}

std::uint64_t run_seed(std::uint64_t seed, int run_index) {
  std::uint64_t z = seed + static_cast<std::uint64_t>(run_index) + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RunRecord run_once(const SimConfig& cfg, int run_index) {
  cfg.validate();
  Rng rng(run_seed(cfg.seed, run_index));
  const double horizon = cfg.effective_horizon();
  const double warmup = cfg.warmup_frac * horizon;
  const double total_rate = cfg.lambda * cfg.N;
  const bool add_tau = cfg.policy == Policy::LL && cfg.overhead_tau > 0.0;
  const auto bins = static_cast<std::size_t>(std::llround(cfg.ccdf_smax / cfg.ccdf_h));

  RunRecord rec;
  rec.hist.assign(bins + 1, 0);
  if (total_rate <= 0.0) return rec;

  ClusterState state(cfg.N, cfg.policy == Policy::SQ);
  std::vector<int> sampled(static_cast<std::size_t>(cfg.d));
  std::uniform_int_distribution<int> pick(0, cfg.N - 1);
  double sum = 0.0;
  double t = 0.0;
  for (;;) {
    t += -std::log(uniform_open01(rng)) / total_rate;
    if (t > horizon) break;
    for (int& j : sampled) j = pick(rng);
    const int server = choose_server(cfg.policy, state, t, sampled, rng);
    double size = cfg.law.sample(rng);
    if (add_tau) size += cfg.overhead_tau;
    const double response = state.admit(server, t, size);
    if (t < warmup) {
      ++rec.jobs_warmup;
      continue;
    }
    ++rec.jobs_counted;
    sum += response;
    // Bin k holds (k h, (k+1) h]; the slack keeps exact grid values in the
    // lower bin.
    const double x = response / cfg.ccdf_h;
    const double k = std::ceil(x - 1e-9 * std::max(1.0, x)) - 1.0;
    const auto idx = k < 0.0 ? 0 : std::min(bins, static_cast<std::size_t>(k));
    ++rec.hist[idx];
  }
  rec.mean_response = rec.jobs_counted > 0 ? sum / static_cast<double>(rec.jobs_counted) : 0.0;
  return rec;
}

SimSummary run_replicated(const SimConfig& cfg) {
  cfg.validate();
  std::vector<RunRecord> records(static_cast<std::size_t>(cfg.runs));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min(cfg.runs, cfg.threads > 0 ? cfg.threads : static_cast<int>(hw));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < cfg.runs; r += workers) records[r] = run_once(cfg, r);
      });
    }
  }

  SimSummary s;
  const std::size_t bins = records.front().hist.size();
  std::vector<std::uint64_t> pooled(bins, 0);
  for (const auto& r : records) {
    s.per_run_means.push_back(r.mean_response);
    s.jobs_counted += r.jobs_counted;
    s.jobs_warmup += r.jobs_warmup;
    for (std::size_t k = 0; k < bins; ++k) pooled[k] += r.hist[k];
  }
  const double n = static_cast<double>(cfg.runs);
  double mean = 0.0;
  for (double m : s.per_run_means) mean += m;
  mean /= n;
  s.mean_response = mean;
  if (cfg.runs > 1) {
    double ss = 0.0;
    for (double m : s.per_run_means) ss += (m - mean) * (m - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const boost::math::students_t dist(n - 1.0);
    s.ci_halfwidth = boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
  } else {
    s.ci_halfwidth = std::numeric_limits<double>::infinity();
  }

  // ccdf at grid point i: responses in bins i, i+1, ... (overflow included).
  s.empirical_ccdf = CcdfCurve(cfg.ccdf_h, std::vector<double>(bins, 0.0));
  if (s.jobs_counted > 0) {
    std::uint64_t above = 0;
    for (std::size_t i = bins; i-- > 0;) {
      above += pooled[i];
      s.empirical_ccdf.values[i] =
          static_cast<double>(above) / static_cast<double>(s.jobs_counted);
    }
  }
  return s;
}

CcdfCurve empirical_response_ccdf(std::vector<double> samples, double h, std::size_t n) {
  if (samples.empty()) throw std::invalid_argument("empirical_response_ccdf: no samples");
  std::sort(samples.begin(), samples.end());
  const double total = static_cast<double>(samples.size());
  return CcdfCurve::tabulate(h, n, [&](double s) {
    const auto it = std::upper_bound(samples.begin(), samples.end(), s);
    return static_cast<double>(samples.end() - it) / total;
  });
}

void write_summary(std::ostream& os, const SimConfig& cfg, const SimSummary& s) {
  os << "summary\n" << std::setprecision(17);
  os << "mean_response," << s.mean_response << '\n';
  os << "ci_halfwidth," << s.ci_halfwidth << '\n';
  os << "runs," << cfg.runs << '\n';
  os << "seed," << cfg.seed << '\n';
  os << "jobs_counted," << s.jobs_counted << '\n';
  os << "jobs_warmup," << s.jobs_warmup << '\n';
}

}  // namespace llmf
