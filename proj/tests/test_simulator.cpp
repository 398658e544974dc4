#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "llmf/simulator.hpp"

using namespace llmf;

TEST_SUITE("simulator") {
  TEST_CASE("FCFS server bookkeeping") {
    ClusterState st(2, true);
    CHECK(st.workload(0, 0.0) == 0.0);
    CHECK(st.admit(0, 1.0, 2.0) == doctest::Approx(2.0));
    CHECK(st.admit(0, 2.0, 1.0) == doctest::Approx(2.0));  // waits 1, serves 1
    CHECK(st.workload(0, 2.5) == doctest::Approx(1.5));
    CHECK(st.queue_length(0, 2.5) == 2);
    CHECK(st.queue_length(0, 3.0) == 1);  // first job left at t = 3
    CHECK(st.queue_length(0, 4.0) == 0);
    CHECK(st.workload(0, 5.0) == 0.0);
    CHECK(st.admit(0, 6.0, 0.5) == doctest::Approx(0.5));
    CHECK(st.queue_length(1, 0.0) == 0);
  }

  TEST_CASE("least loaded and shortest queue choices") {
    Rng rng(3);
    ClusterState st(4, true);
    st.admit(0, 0.0, 5.0);
    st.admit(1, 0.0, 1.0);
    st.admit(1, 0.0, 1.0);
    st.admit(2, 0.0, 3.0);
    const std::vector<int> s1 = {0, 1, 2};
    // Workloads 5, 2, 3; queue lengths 1, 2, 1.
    CHECK(choose_server(Policy::LL, st, 0.0, s1, rng) == 1);
    std::set<int> seen;
    for (int i = 0; i < 200; ++i) seen.insert(choose_server(Policy::SQ, st, 0.0, s1, rng));
    CHECK(seen == std::set<int>{0, 2});
    CHECK_THROWS_AS(choose_server(Policy::LL, st, 0.0, std::vector<int>{}, rng), std::invalid_argument);
  }

  TEST_CASE("ties are broken uniformly among distinct servers") {
    Rng rng(4);
    ClusterState st(8, false);
    const std::vector<int> s = {3, 3, 3, 5};
    int threes = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) threes += choose_server(Policy::LL, st, 0.0, s, rng) == 3;
    CHECK(std::abs(static_cast<double>(threes) / n - 0.5) <= 0.005);
  }

  TEST_CASE("run seeds") {
    CHECK(run_seed(1, 0) == run_seed(1, 0));
    std::set<std::uint64_t> seeds;
    for (int r = 0; r < 1000; ++r) seeds.insert(run_seed(42, r));
    CHECK(seeds.size() == 1000);
  }

  TEST_CASE("configuration checks") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.N = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.warmup_frac = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.runs = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.overhead_tau = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.N = 100;
    CHECK(c.effective_horizon() == doctest::Approx(1e5));
  }

  TEST_CASE("reproducible and independent of the thread count") {
    SimConfig c;
    c.N = 20;
    c.lambda = 0.8;
    c.horizon = 2000.0;
    c.runs = 4;
    c.seed = 9;
    c.threads = 1;
    const auto a = run_replicated(c);
    c.threads = 4;
    const auto b = run_replicated(c);
    CHECK(a.per_run_means == b.per_run_means);
    CHECK(a.empirical_ccdf.values == b.empirical_ccdf.values);
    CHECK(a.per_run_means[0] != a.per_run_means[1]);
    CHECK(a.empirical_ccdf.values[0] == 1.0);
    CHECK(is_valid_ccdf(a.empirical_ccdf));
    CHECK(a.jobs_counted > 0);
    CHECK(a.jobs_warmup > 0);
  }

  TEST_CASE("random routing reduces to M/M/1 queues") {
    // d = 1 sends each job to one uniformly chosen server.
    SimConfig c;
    c.N = 10;
    c.lambda = 0.5;
    c.d = 1;
    c.horizon = 2e5;
    c.runs = 4;
    const auto s = run_replicated(c);
    CHECK(std::abs(s.mean_response - 2.0) <= 0.05);
    // Response of M/M/1 is exponential with rate 1 - lambda.
    for (double x : {1.0, 3.0, 6.0}) {
      CHECK(std::abs(s.empirical_ccdf.at(x) - std::exp(-0.5 * x)) <= 0.01);
    }
  }

  TEST_CASE("deterministic jobs and overhead") {
    SimConfig c;
    c.N = 50;
    c.lambda = 0.01;
    c.law = JobSizeLaw(Deterministic{1.0});
    c.horizon = 2000.0;
    c.runs = 2;
    const auto s = run_replicated(c);
    // Almost never any waiting at this load.
    CHECK(s.mean_response == doctest::Approx(1.0).epsilon(1e-3));
    c.overhead_tau = 0.25;
    const auto t = run_replicated(c);
    CHECK(t.mean_response == doctest::Approx(1.25).epsilon(1e-3));
    c.policy = Policy::SQ;  // the overhead applies to LL only
    CHECK(run_replicated(c).mean_response == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("single run has an infinite interval") {
    SimConfig c;
    c.N = 5;
    c.horizon = 100.0;
    c.runs = 1;
    CHECK(std::isinf(run_replicated(c).ci_halfwidth));
  }

  TEST_CASE("empirical ccdf from samples") {
    const auto c = empirical_response_ccdf({0.5, 1.0, 1.5, 2.5}, 0.5, 7);
    const std::vector<double> want = {1.0, 0.75, 0.5, 0.25, 0.25, 0.0, 0.0};
    CHECK(c.values == want);
    CHECK_THROWS_AS(empirical_response_ccdf({}, 0.5, 3), std::invalid_argument);
  }

  TEST_CASE("histogram puts grid values in the lower bin") {
    SimConfig c;
    c.N = 1;
    c.lambda = 1e-4;  // no queueing at all
    c.law = JobSizeLaw(Deterministic{1.0});
    c.horizon = 1e6;
    c.runs = 1;
    c.ccdf_h = 0.5;
    c.ccdf_smax = 3.0;
    const auto rec = run_once(c, 0);
    REQUIRE(rec.jobs_counted > 0);
    CHECK(rec.hist[1] == rec.jobs_counted);  // every response is 1 = 2h, in (h, 2h]
  }

  TEST_CASE("summary block") {
    SimConfig c;
    SimSummary s;
    s.mean_response = 2.0;
    std::ostringstream os;
    write_summary(os, c, s);
    CHECK(os.str().find("mean_response,2") != std::string::npos);
    CHECK(os.str().rfind("summary\n", 0) == 0);
  }
}
