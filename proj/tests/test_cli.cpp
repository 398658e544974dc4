#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "llmf/analytic_exp.hpp"
#include "llmf/curve.hpp"

using namespace llmf;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "llmf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("closed-form workload") {
    const auto r = run({"workload", "--lambda", "0.5", "--d", "2", "--method", "closed", "--step", "0.5",
                        "--smax", "2"});
    REQUIRE(r.code == kExitOk);
    std::istringstream is(r.out);
    const auto c = read_csv(is);
    REQUIRE(c.size() == 5);
    const auto p = ModelParams::exponential(0.5, 2);
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK(c.values[i] == doctest::Approx(ll_workload_ccdf_exp(p, 0.5 * i)).epsilon(1e-15));
  }

  TEST_CASE("method comparison is reported") {
    const auto r = run({"workload", "--lambda", "0.5", "--d", "2", "--method", "fp", "--compare", "closed",
                        "--step", "0.01"});
    CHECK(r.code == kExitOk);
    CHECK(r.err.find("d_K(fp, closed)") != std::string::npos);
    CHECK(r.err.find("contraction bound") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    CHECK(run({}).code == kExitInvalid);
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({"workload", "--bogus", "1"}).code == kExitInvalid);
    CHECK(run({"workload", "--lambda", "1.0"}).code == kExitInvalid);
    CHECK(run({"workload", "--law", "gamma(k=2)"}).code == kExitInvalid);
    CHECK(run({"workload", "--method", "closed", "--law", "det(c=1)"}).code == kExitInvalid);
    CHECK(run({"workload", "--lambda", "0.9", "--method", "fp", "--max-iter", "2"}).code ==
          kExitNoConvergence);
    CHECK(run({"transient", "--lambda", "0.5", "--step", "0.01", "--dt", "0.02", "--times", "1"}).code ==
          kExitInvalid);
  }

  TEST_CASE("response with both policies") {
    const auto ll = run({"response", "--lambda", "0.7", "--d", "2", "--policy", "ll", "--method", "closed",
                         "--step", "0.1", "--smax", "1"});
    REQUIRE(ll.code == kExitOk);
    CHECK(ll.out.rfind("s,ccdf\n", 0) == 0);
    const auto sq = run({"response", "--lambda", "0.7", "--d", "2", "--policy", "sq", "--step", "0.1",
                         "--smax", "1"});
    REQUIRE(sq.code == kExitOk);
    std::istringstream a(ll.out), b(sq.out);
    const auto cl = read_csv(a);
    const auto cs = read_csv(b);
    CHECK(cs.values.back() > cl.values.back());
  }

  TEST_CASE("ratio sweep") {
    const auto r = run({"ratio-sweep", "--lambdas", "0.5,0.9", "--d", "2"});
    REQUIRE(r.code == kExitOk);
    std::istringstream is(r.out);
    std::string header, row;
    std::getline(is, header);
    CHECK(header == "lambda,d,T_sq,T_ll,ratio");
    std::getline(is, row);
    const auto p = ModelParams::exponential(0.5, 2);
    const double want = sq_mean_response_exp(p) / ll_mean_response(p).value;
    const double got = std::stod(row.substr(row.rfind(',') + 1));
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }

  TEST_CASE("config file with an override and an unused key") {
    const std::string path = "llmf_cli_test.cfg";
    {
      std::ofstream f(path);
      f << "lambda = 0.3\nd = 3\nmethod = closed\nstep = 0.5\nsmax = 1\nruns = 5\n";
    }
    const auto r = run({"workload", "--config", path, "--lambda", "0.6"});
    std::remove(path.c_str());
    REQUIRE(r.code == kExitOk);
    CHECK(r.err.find("ignoring key 'runs'") != std::string::npos);
    std::istringstream is(r.out);
    const auto c = read_csv(is);
    CHECK(c.values[0] == doctest::Approx(0.6));
    CHECK(c.values[1] == doctest::Approx(ll_workload_ccdf_exp(ModelParams::exponential(0.6, 3), 0.5)));
    CHECK(run({"workload", "--config", "/nonexistent.cfg"}).code == kExitInvalid);
  }

  TEST_CASE("small simulation") {
    const auto r = run({"simulate", "--N", "20", "--lambda", "0.5", "--horizon", "500", "--runs", "2",
                        "--step", "0.5", "--smax", "2", "--overlay", "closed"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.rfind("s,ccdf,limit\n", 0) == 0);
    CHECK(r.err.find("mean_response,") != std::string::npos);
    CHECK(r.err.find("sup_distance,") != std::string::npos);
  }

  TEST_CASE("short transient") {
    const auto r = run({"transient", "--lambda", "0.5", "--step", "0.05", "--dt", "0.05", "--smax", "5",
                        "--times", "0.5,1"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.rfind("t,s,ccdf\n", 0) == 0);
    CHECK(r.err.find("max_mass_error") != std::string::npos);
  }

  TEST_CASE("selftest passes") {
    const auto r = run({"selftest"});
    CAPTURE(r.out);
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("selftest passed") != std::string::npos);
  }
}
