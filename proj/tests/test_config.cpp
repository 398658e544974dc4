#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "llmf/config.hpp"

using namespace llmf;

TEST_SUITE("config") {
  TEST_CASE("law grammar") {
    CHECK(parse_law("exp(rate=2)").as<Exponential>().rate == 2.0);
    CHECK(parse_law("exp").mean() == doctest::Approx(1.0));
    CHECK(parse_law(" exp ( rate = 0.5 ) ").mean() == doctest::Approx(2.0));
    const auto h = parse_law("hexp(scv=20, f=0.5)");
    CHECK(h.mean() == doctest::Approx(1.0));
    CHECK(h.scv() == doctest::Approx(20.0));
    CHECK(parse_law("hexp(scv=4,f=0.3,mean=2)").mean() == doctest::Approx(2.0));
    const auto raw = parse_law("hexp(p=0.9,mu1=2,mu2=0.2)").as<HyperExp2>();
    CHECK(raw.p == 0.9);
    CHECK(raw.mu2 == 0.2);
    CHECK(parse_law("erlang(k=2,mean=1)").as<ErlangK>().rate == doctest::Approx(2.0));
    CHECK(parse_law("erlang(k=3,rate=1)").mean() == doctest::Approx(3.0));
    CHECK(parse_law("det(c=2)").as<Deterministic>().c == 2.0);
    CHECK(parse_law("det").mean() == 1.0);
    const auto pw = parse_law("powerlaw(beta=2,smin=1)").as<PowerLaw>();
    CHECK(pw.beta == 2.0);
    const auto ph = parse_law("ph(alpha=[0.5,0.5], A=[-1,0;0,-2])");
    CHECK(ph.mean() == doctest::Approx(0.75));
    const auto dp = parse_law("detph(tau=0.05, inner=hexp(scv=20,f=0.5))");
    CHECK(dp.as<DetPlusPh>().tau == 0.05);
    CHECK(dp.mean() == doctest::Approx(1.05));
  }

  TEST_CASE("describe round trips") {
    for (const char* text : {"exp(rate=1.5)", "hexp(p=0.25,mu1=3,mu2=0.5)", "erlang(k=4,rate=2)",
                             "det(c=0.5)", "powerlaw(beta=2.5,smin=0.4)",
                             "ph(alpha=[0.3,0.7],A=[-2,1;0.5,-1.5])",
                             "detph(tau=0.2,inner=exp(rate=1))"}) {
      CAPTURE(text);
      const auto law = parse_law(text);
      const auto again = parse_law(law.describe());
      for (double s : {0.0, 0.3, 1.0, 2.7}) CHECK(again.ccdf(s) == doctest::Approx(law.ccdf(s)));
    }
  }

  TEST_CASE("malformed laws") {
    for (const char* bad : {"", "gamma(k=2)", "exp(rate=1", "exp(speed=1)", "exp(rate=1,rate=2)",
                            "exp(rate=abc)", "hexp(scv=0.5,f=0.5)", "hexp(scv=2)x",
                            "ph(alpha=[1],A=[1])", "ph(alpha=[0.5,0.5],A=[-1,0])",
                            "detph(tau=0.1)", "erlang(k=2.5)", "powerlaw(beta=1)"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_law(bad), std::invalid_argument);
    }
  }

  TEST_CASE("flat config files") {
    const std::string path = "llmf_test_config.cfg";
    {
      std::ofstream f(path);
      f << "# comment\n\nlambda = 0.9\n  d=3  \nlaw = hexp(scv=20, f=0.5)\n";
    }
    const auto kv = read_flat_config(path);
    REQUIRE(kv.size() == 3);
    CHECK(kv[0].first == "lambda");
    CHECK(kv[0].second == "0.9");
    CHECK(kv[1].first == "d");
    CHECK(kv[1].second == "3");
    CHECK(kv[2].second == "hexp(scv=20, f=0.5)");
    std::remove(path.c_str());
    CHECK_THROWS(read_flat_config("/nonexistent/llmf.cfg"));
  }

  TEST_CASE("config lines without '=' are rejected") {
    const std::string path = "llmf_test_bad.cfg";
    {
      std::ofstream f(path);
      f << "lambda 0.9\n";
    }
    CHECK_THROWS_AS(read_flat_config(path), std::invalid_argument);
    std::remove(path.c_str());
  }
}
