#include <doctest.h>

#include <cmath>
#include <random>

#include "llmf/analytic_exp.hpp"
#include "oracles.hpp"

using namespace llmf;

TEST_SUITE("analytic_exp") {
  TEST_CASE("workload ccdf boundary values") {
    for (int d : {2, 3, 4}) {
      for (double lam : {0.1, 0.5, 0.9, 0.99}) {
        const auto p = ModelParams::exponential(lam, d);
        CHECK(ll_workload_ccdf_exp(p, 0.0) == doctest::Approx(lam).epsilon(1e-14));
        CHECK(ll_workload_ccdf_exp(p, 1e4) >= 0.0);
        CHECK(ll_workload_ccdf_exp(p, 1e4) < 1e-300);
        CHECK(ll_response_ccdf_exp(p, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("workload ccdf solves the Riccati equation") {
    // Fbar' = lambda Fbar^d - Fbar, checked by central differences.
    for (int d : {2, 3, 5}) {
      const auto p = ModelParams::exponential(0.8, d);
      for (double s = 0.1; s < 10.0; s += 0.37) {
        const double e = 1e-5;
        const double deriv =
            (ll_workload_ccdf_exp(p, s + e) - ll_workload_ccdf_exp(p, s - e)) / (2 * e);
        const double f = ll_workload_ccdf_exp(p, s);
        CHECK(std::abs(deriv - (p.lambda * std::pow(f, d) - f)) <= 1e-8);
        CHECK(ll_workload_density_exp(p, s) == doctest::Approx(-deriv).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("response density matches the ccdf slope") {
    const auto p = ModelParams::exponential(0.9, 3);
    for (double s = 0.05; s < 8.0; s += 0.29) {
      const double e = 1e-5;
      const double deriv = (ll_response_ccdf_exp(p, s + e) - ll_response_ccdf_exp(p, s - e)) / (2 * e);
      CHECK(ll_response_density_exp(p, s) == doctest::Approx(-deriv).epsilon(1e-7));
    }
  }

  TEST_CASE("mean series agree with integrals of the ccdfs") {
    for (int d : {2, 3, 4}) {
      for (double lam : {0.3, 0.7, 0.95}) {
        CAPTURE(d);
        CAPTURE(lam);
        const auto p = ModelParams::exponential(lam, d);
        const double w = oracle::integrate([&](double s) { return ll_workload_ccdf_exp(p, s); },
                                           0.0, 200.0, 1e-13);
        const double t = oracle::integrate([&](double s) { return ll_response_ccdf_exp(p, s); },
                                           0.0, 200.0, 1e-13);
        CHECK(std::abs(ll_mean_workload(p).value - w) <= 1e-9);
        CHECK(std::abs(ll_mean_response(p).value - t) <= 1e-9);
      }
    }
  }

  TEST_CASE("logarithmic closed forms") {
    for (double lam : {0.05, 0.5, 0.9, 0.999}) {
      CHECK(ll_mean_workload_d2(lam) ==
            doctest::Approx(ll_mean_workload(ModelParams::exponential(lam, 2)).value).epsilon(1e-13));
      CHECK(ll_mean_workload_d3(lam) ==
            doctest::Approx(ll_mean_workload(ModelParams::exponential(lam, 3)).value).epsilon(1e-12));
    }
    CHECK(ll_mean_workload_d2(0.0) == 0.0);
  }

  TEST_CASE("series tail bounds") {
    const auto p = ModelParams::exponential(0.9, 2);
    const auto exact = ll_mean_response(p);
    for (int n : {1, 5, 20, 100}) {
      const auto partial = ll_mean_response(p, n);
      CHECK(partial.value <= exact.value);
      CHECK(exact.value - partial.value <= partial.error_bound * (1 + 1e-12));
    }
    CHECK(exact.error_bound <= 1e-16 * exact.value);
  }

  TEST_CASE("response ccdf is the workload ccdf pushed through a job") {
    for (int d : {2, 3}) {
      const auto p = ModelParams::exponential(0.85, d);
      for (double s : {0.0, 0.3, 1.0, 2.5, 6.0}) {
        const double via = oracle::exp_response_from_workload(
            [&](double x) { return ll_workload_ccdf_exp(p, x); }, d, s);
        CHECK(std::abs(via - ll_response_ccdf_exp(p, s)) <= 1e-11);
      }
    }
  }

  TEST_CASE("SQ mean and ccdf agree") {
    for (int d : {2, 3}) {
      for (double lam : {0.5, 0.9}) {
        const auto p = ModelParams::exponential(lam, d);
        const double integral = oracle::integrate(
            [&](double s) { return sq_response_ccdf_exp(p, s); }, 0.0, 300.0, 1e-12);
        CHECK(std::abs(integral - sq_mean_response_exp(p)) <= 1e-8);
        // Mean from tails: sum_k P(Q >= k) / lambda (Little).
        double tails = 0.0;
        for (int k = 1; k < 60; ++k) tails += oracle::sq_exp_tail(lam, d, k);
        CHECK(sq_mean_response_exp(p) == doctest::Approx(tails / lam).epsilon(1e-13));
      }
    }
    CHECK(sq_response_ccdf_exp(ModelParams::exponential(0.9, 2), 0.0) == 1.0);
  }

  TEST_CASE("gap series equals SQ minus LL") {
    for (int d : {2, 3, 4}) {
      for (double lam : {0.2, 0.6, 0.9}) {
        CAPTURE(d);
        CAPTURE(lam);
        const auto p = ModelParams::exponential(lam, d);
        const auto gap = ll_sq_gap_series(p);
        const double direct = sq_mean_response_exp(p) - ll_mean_response(p).value;
        CHECK(std::abs(gap.total - direct) <= 1e-10);
        CHECK(gap.total > 0.0);
        for (double a : gap.terms) CHECK(a >= -1e-15);
      }
    }
  }

  TEST_CASE("ratio limit") {
    CHECK(ratio_limit(2) == doctest::Approx(1.0 / std::log(2.0)));
    CHECK(ratio_limit(3) == doctest::Approx(2.0 / std::log(3.0)));
    CHECK_THROWS_AS(ratio_limit(1), std::invalid_argument);
    // The SQ / LL ratio climbs towards the limit.
    const auto p = ModelParams::exponential(0.999, 2);
    const double r = sq_mean_response_exp(p) / ll_mean_response(p).value;
    CHECK(r < ratio_limit(2));
    CHECK(r > 1.3);
  }

  TEST_CASE("replication baseline") {
    CHECK(rr_mean_response(0.0, 2, 1.0) == doctest::Approx(0.5));
    CHECK(rr_mean_response(0.0, 3, 2.0) == doctest::Approx(1.0 / 6.0));
    double sum = 0.0;
    for (int n = 0; n < 2000; ++n) sum += std::pow(0.5, n) / (n + 2.0);
    CHECK(rr_mean_response(0.5, 2, 1.0) == doctest::Approx(sum).epsilon(1e-14));
    CHECK_THROWS_AS(rr_mean_response(1.0, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rr_mean_response(0.5, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rr_mean_response(0.5, 2, 0.0), std::invalid_argument);
  }

  TEST_CASE("property: random parameters give valid ccdfs with LL below SQ") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lam_dist(0.01, 0.99);
    std::uniform_int_distribution<int> d_dist(2, 6);
    for (int trial = 0; trial < 200; ++trial) {
      const double lam = lam_dist(rng);
      const int d = d_dist(rng);
      CAPTURE(lam);
      CAPTURE(d);
      const auto p = ModelParams::exponential(lam, d);
      double prev_w = 1.0;
      double prev_r = 1.0;
      for (double s = 0.0; s < 30.0; s += 0.25) {
        const double w = ll_workload_ccdf_exp(p, s);
        const double r = ll_response_ccdf_exp(p, s);
        CHECK(w >= 0.0);
        CHECK(w <= prev_w);
        CHECK(r <= prev_r);
        CHECK(r >= std::exp(-s) * (1 - 1e-14));
        prev_w = w;
        prev_r = r;
      }
      CHECK(ll_mean_response(p).value <= sq_mean_response_exp(p) + 1e-12);
    }
  }
}
