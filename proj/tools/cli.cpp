#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "llmf/analytic_exp.hpp"
#include "llmf/config.hpp"
#include "llmf/curve.hpp"
#include "llmf/jobsize.hpp"
#include "llmf/model.hpp"
#include "llmf/ph_ode.hpp"
#include "llmf/simulator.hpp"
#include "llmf/sq_cavity.hpp"
#include "llmf/transient.hpp"
#include "llmf/workload.hpp"

namespace llmf {

namespace {

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs fn(i) for i < n on a few threads; results land by index so the
// output order never depends on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          try {
            out[i] = fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Common model flags.
struct ModelFlags {
  std::string law = "exp(rate=1)";
  double lambda = 0.9;
  int d = 2;

  void add(CLI::App* app) {
    app->add_option("--law,--jobsize", law, "job-size law, e.g. exp(rate=1), hexp(scv=20,f=0.5)");
    app->add_option("--lambda", lambda, "arrival rate per server");
    app->add_option("--d", d, "number of sampled servers");
  }
};

struct SolverFlags {
  std::string method = "auto";
  double h = 1e-3;
  double tol = 1e-8;
  int max_iter = 20000;
  double smax = 0.0;

  void add(CLI::App* app) {
    app->add_option("--method", method, "closed | fp | ode | auto")
        ->check(CLI::IsMember({"auto", "closed", "fp", "ode"}));
    app->add_option("--step", h, "grid step");
    app->add_option("--tol", tol, "fixed-point tolerance on successive d_K");
    app->add_option("--max-iter", max_iter, "fixed-point iteration limit");
    app->add_option("--smax", smax, "truncation point (0: automatic)");
  }
};

class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::invalid_argument("cannot open output file '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

// Shortest text that reads back to the same double; used for input columns.
std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

bool is_unit_exponential(const JobSizeLaw& law) {
  return law.is<Exponential>() && std::abs(law.as<Exponential>().rate - 1.0) < 1e-15;
}

std::string resolve_method(const std::string& method, const JobSizeLaw& law) {
  if (method != "auto") return method;
  if (is_unit_exponential(law)) return "closed";
  if (law.is<PowerLaw>()) return "fp";
  return "ode";
}

void print_report(std::ostream& err, const FixedPointReport& r) {
  err << "fixed point: iterations=" << r.iterations << " final_dk=" << r.final_dk
      << " converged=" << (r.converged ? "yes" : "no") << " smax=" << r.smax
      << " tail=" << r.tail_value << (r.smax_capped ? " (smax capped)" : "") << '\n';
  err << "contraction bound d*rho^d=" << r.contraction_bound;
  if (r.unproven_regime) {
    err << " (unproven regime: no contraction guarantee)\n";
  } else {
    err << " a_posteriori_bound=" << r.a_posteriori_bound << '\n';
  }
  err << "contraction estimates:";
  for (double c : r.contraction_estimates) err << ' ' << c;
  err << '\n';
}

// Stationary workload curve by the requested method.
CcdfCurve workload_curve(const std::string& method, const JobSizeLaw& law, const ModelParams& p,
                         const SolverFlags& sf, std::ostream& err) {
  if (method == "closed") {
    if (!is_unit_exponential(law)) {
      throw std::invalid_argument("--method closed needs exp(rate=1) jobs");
    }
    const double smax = sf.smax > 0.0 ? sf.smax : 40.0;
    const auto n = static_cast<std::size_t>(std::llround(smax / sf.h)) + 1;
    return CcdfCurve::tabulate(sf.h, n, [&](double s) { return ll_workload_ccdf_exp(p, s); });
  }
  if (method == "ode") {
    OdeOptions o;
    o.h_step = sf.h;
    o.smax = sf.smax;
    return solve_workload_ode(law, p, o);
  }
  StationaryOptions o;
  o.h = sf.h;
  o.tol = sf.tol;
  o.max_iter = sf.max_iter;
  if (sf.smax > 0.0) {
    o.smax_initial = sf.smax;
    o.smax_cap = sf.smax;
  }
  auto sol = solve_stationary(law, p, o);
  print_report(err, sol.report);
  if (!sol.report.converged) {
    throw NoConvergence("fixed-point iteration did not converge within --max-iter");
  }
  return std::move(sol.curve);
}

// Mean LL response E[G] + int Fbar^d from a workload curve.
double ll_mean_from_workload(const CcdfCurve& w, const JobSizeLaw& law, int d) {
  CcdfCurve wait(w.h, std::vector<double>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) wait.values[i] = std::pow(w.values[i], d);
  return law.mean() + mean_from_curve(wait).value;
}

double ll_mean_response_any(const JobSizeLaw& law, const ModelParams& p, double h) {
  if (is_unit_exponential(law)) return ll_mean_response(p).value;
  OdeOptions o;
  o.h_step = h;
  if (law.is<PowerLaw>()) {
    StationaryOptions so;
    so.h = h;
    auto sol = solve_stationary(law, p, so);
    if (!sol.report.converged) throw NoConvergence("fixed-point iteration did not converge");
    return ll_mean_from_workload(sol.curve, law, p.d);
  }
  return ll_mean_from_workload(solve_workload_ode(law, p, o), law, p.d);
}

double sq_mean_response_any(const JobSizeLaw& law, const ModelParams& p) {
  if (is_unit_exponential(law)) return sq_mean_response_exp(p);
  auto sol = solve_sq_cavity(law, p);
  if (!sol.report.converged) throw NoConvergence("SQ cavity iteration did not converge");
  return sol.report.mean_response;
}

// LL mean response with jobs of size tau + inner (inner has a PH form).
double ll_mean_with_overhead(double tau, const PhRep& inner, const ModelParams& p, double h0) {
  OdeOptions o;
  o.h_step = tau > 0.0 ? tau / std::ceil(tau / h0) : h0;
  const JobSizeLaw law(DetPlusPh{tau, inner});
  return ll_mean_from_workload(solve_det_plus_ph(tau, inner, p, o), law, p.d);
}

// ----------------------------------------------------------------------------

int cmd_workload(const ModelFlags& mf, const SolverFlags& sf, const std::string& out_path,
                 const std::string& compare, std::ostream& out, std::ostream& err) {
  const JobSizeLaw law = parse_law(mf.law);
  const auto p = ModelParams::for_law(mf.lambda, mf.d, law);
  const std::string method = resolve_method(sf.method, law);
  const CcdfCurve curve = workload_curve(method, law, p, sf, err);
  if (!compare.empty()) {
    const CcdfCurve other = workload_curve(compare, law, p, sf, err);
    err << "d_K(" << method << ", " << compare << ") = " << kolmogorov_distance(curve, other)
        << '\n';
  }
  OutputTarget target(out_path, out);
  write_csv(target.stream(), curve);
  return kExitOk;
}

int cmd_response(const ModelFlags& mf, const SolverFlags& sf, const std::string& policy,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
  const JobSizeLaw law = parse_law(mf.law);
  const auto p = ModelParams::for_law(mf.lambda, mf.d, law);
  const std::string method = resolve_method(sf.method, law);
  CcdfCurve curve;
  const double smax = sf.smax > 0.0 ? sf.smax : 40.0;
  const auto n = static_cast<std::size_t>(std::llround(smax / sf.h)) + 1;
  if (policy == "sq") {
    if (!is_unit_exponential(law)) {
      throw std::invalid_argument("SQ response ccdf is available for exp(rate=1) jobs only");
    }
    curve = CcdfCurve::tabulate(sf.h, n, [&](double s) { return sq_response_ccdf_exp(p, s); });
  } else if (method == "closed") {
    if (!is_unit_exponential(law)) {
      throw std::invalid_argument("--method closed needs exp(rate=1) jobs");
    }
    curve = CcdfCurve::tabulate(sf.h, n, [&](double s) { return ll_response_ccdf_exp(p, s); });
  } else {
    curve = response_ccdf(workload_curve(method, law, p, sf, err), law, p.d);
  }
  err << "mean response = " << mean_from_curve(curve).value << '\n';
  OutputTarget target(out_path, out);
  write_csv(target.stream(), curve);
  return kExitOk;
}

int cmd_ratio_sweep(const std::string& law_text, const std::vector<double>& lambdas,
                    const std::vector<int>& ds, double h, const std::string& out_path,
                    std::ostream& out) {
  const JobSizeLaw law = parse_law(law_text);
  struct Point {
    double lambda;
    int d;
  };
  std::vector<Point> points;
  for (int d : ds) {
    for (double l : lambdas) points.push_back({l, d});
  }
  for (const auto& pt : points) ModelParams::for_law(pt.lambda, pt.d, law);  // validate up front
  const auto rows = parallel_map<std::pair<double, double>>(points.size(), [&](std::size_t i) {
    const auto p = ModelParams::for_law(points[i].lambda, points[i].d, law);
    return std::make_pair(sq_mean_response_any(law, p), ll_mean_response_any(law, p, h));
  });
  OutputTarget target(out_path, out);
  auto& os = target.stream();
  os << "lambda,d,T_sq,T_ll,ratio\n" << std::setprecision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << shortest(points[i].lambda) << ',' << points[i].d << ',' << rows[i].first << ','
       << rows[i].second << ',' << rows[i].first / rows[i].second << '\n';
  }
  return kExitOk;
}

}  // namespace

double tau_frontier_point(const JobSizeLaw& law, double lambda, int d, double tol, double h,
                          std::ostream& err) {
  const PhRep inner = as_ph(law);
  const auto p = ModelParams::for_law(lambda, d, law);
  const double t_sq = sq_mean_response_any(law, p);
  const double m = inner.mean();
  if (ll_mean_with_overhead(0.0, inner, p, h) > t_sq) {
    err << "warning: LL exceeds SQ already at tau = 0 (lambda = " << lambda << ")\n";
    return 0.0;
  }
  double lo = 0.0;
  double hi = 1.0 / lambda - m;  // rho reaches 1 here
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const auto pm = ModelParams{lambda, d, lambda * (mid + m)};
    if (pm.rho < 1.0 && ll_mean_with_overhead(mid, inner, pm, h) <= t_sq) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

namespace {

int cmd_tau_frontier(const std::string& law_text, const std::vector<double>& lambdas, int d,
                     double tol, double h, const std::string& out_path, std::ostream& out,
                     std::ostream& err) {
  const JobSizeLaw law = parse_law(law_text);
  as_ph(law);
  for (double l : lambdas) ModelParams::for_law(l, d, law);
  std::vector<std::string> warnings(lambdas.size());
  const auto taus = parallel_map<double>(lambdas.size(), [&](std::size_t i) {
    std::ostringstream w;
    const double t = tau_frontier_point(law, lambdas[i], d, tol, h, w);
    warnings[i] = w.str();
    return t;
  });
  for (const auto& w : warnings) err << w;
  OutputTarget target(out_path, out);
  auto& os = target.stream();
  os << "lambda,tau_max\n" << std::setprecision(17);
  for (std::size_t i = 0; i < lambdas.size(); ++i) os << shortest(lambdas[i]) << ',' << taus[i] << '\n';
  return kExitOk;
}

struct SimFlags {
  int N = 100;
  std::string policy = "ll";
  double tau = 0.0;
  double horizon = 0.0;
  double warmup = 0.3;
  int runs = 10;
  std::uint64_t seed = 1;
  double h = 0.01;
  double smax = 30.0;
  std::string overlay;
};

int cmd_simulate(const ModelFlags& mf, const SimFlags& sf, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  cfg.N = sf.N;
  cfg.lambda = mf.lambda;
  cfg.d = mf.d;
  cfg.policy = sf.policy == "sq" ? Policy::SQ : Policy::LL;
  cfg.law = parse_law(mf.law);
  cfg.overhead_tau = sf.tau;
  cfg.horizon = sf.horizon;
  cfg.warmup_frac = sf.warmup;
  cfg.runs = sf.runs;
  cfg.seed = sf.seed;
  cfg.ccdf_h = sf.h;
  cfg.ccdf_smax = sf.smax;
  cfg.validate();
  JobSizeLaw limit_law = cfg.law;
  if (cfg.policy == Policy::LL && cfg.overhead_tau > 0.0) {
    limit_law = JobSizeLaw(DetPlusPh{cfg.overhead_tau, as_ph(cfg.law)});
  }
  const auto p = ModelParams::for_law(cfg.lambda, cfg.d, limit_law);

  CcdfCurve overlay;
  if (!sf.overlay.empty()) {
    if (cfg.policy == Policy::SQ) {
      if (sf.overlay != "closed" || !is_unit_exponential(cfg.law)) {
        throw std::invalid_argument("SQ overlay is available as 'closed' for exp(rate=1) only");
      }
    } else if (sf.overlay == "closed") {
      if (!is_unit_exponential(limit_law)) {
        throw std::invalid_argument("--overlay closed needs exp(rate=1) jobs");
      }
    } else {
      SolverFlags solver;
      solver.method = sf.overlay;
      overlay = response_ccdf(workload_curve(sf.overlay, limit_law, p, solver, err), limit_law, p.d);
    }
  }

  const SimSummary s = run_replicated(cfg);
  auto limit_at = [&](double x) {
    if (cfg.policy == Policy::SQ) return sq_response_ccdf_exp(p, x);
    if (sf.overlay == "closed") return ll_response_ccdf_exp(p, x);
    return overlay.at(x);
  };

  OutputTarget target(out_path, out);
  auto& os = target.stream();
  os << (sf.overlay.empty() ? "s,ccdf\n" : "s,ccdf,limit\n") << std::setprecision(17);
  double sup = 0.0;
  for (std::size_t i = 0; i < s.empirical_ccdf.size(); ++i) {
    const double x = s.empirical_ccdf.s(i);
    os << x << ',' << s.empirical_ccdf.values[i];
    if (!sf.overlay.empty()) {
      const double lim = limit_at(x);
      sup = std::max(sup, std::abs(lim - s.empirical_ccdf.values[i]));
      os << ',' << lim;
    }
    os << '\n';
  }
  if (out_path.empty()) {
    write_summary(err, cfg, s);
    if (!sf.overlay.empty()) err << "sup_distance," << sup << '\n';
  } else {
    std::ofstream side(out_path + ".summary");
    write_summary(side, cfg, s);
    if (!sf.overlay.empty()) side << "sup_distance," << sup << '\n';
  }
  return kExitOk;
}

int cmd_transient(const ModelFlags& mf, double h, double dt, double smax,
                  const std::vector<double>& times, const std::string& out_path, std::ostream& out,
                  std::ostream& err) {
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("time stamps must be >= 0");
  }
  std::vector<double> stamps = times;
  std::sort(stamps.begin(), stamps.end());
  const JobSizeLaw law = parse_law(mf.law);
  const auto p = ModelParams::for_law(mf.lambda, mf.d, law);
  StationaryOptions so;
  so.h = h;
  const auto stat = solve_stationary(law, p, so);
  if (smax <= 0.0) {
    // Cut where the stationary ccdf is negligible.
    std::size_t i = 0;
    while (i + 1 < stat.curve.size() && stat.curve.values[i] > 1e-10) ++i;
    smax = std::max(10.0 * h, stat.curve.s(i) + 1.0);
  }
  const auto res = evolve_transient(law, p, h, dt, smax, stamps);
  OutputTarget target(out_path, out);
  auto& os = target.stream();
  os << "t,s,ccdf\n" << std::setprecision(17);
  err << "t,dk_to_stationary\n";
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    const auto& c = res.curves[k];
    for (std::size_t i = 0; i < c.size(); ++i) {
      os << res.times[k] << ',' << c.s(i) << ',' << c.values[i] << '\n';
    }
    err << res.times[k] << ',' << kolmogorov_distance(c, stat.curve) << '\n';
  }
  err << "max_mass_error," << res.max_mass_error << '\n';
  return kExitOk;
}

// Oracle matrix: each line compares two independent routes.
int cmd_selftest(std::ostream& out) {
  int failures = 0;
  auto check = [&](const std::string& name, double value, double limit) {
    const bool ok = value <= limit;
    if (!ok) ++failures;
    out << (ok ? "ok   " : "FAIL ") << name << ": " << value << " (limit " << limit << ")\n";
  };
  const JobSizeLaw ex;
  for (double lam : {0.5, 0.9}) {
    const auto p = ModelParams::exponential(lam, 2);
    const auto fp = solve_stationary(ex, p).curve;
    const auto closed = CcdfCurve::tabulate(fp.h, fp.size(), [&](double s) {
      return ll_workload_ccdf_exp(p, s);
    });
    const auto ode = solve_ph(as_ph(ex), p);
    const std::string tag = "exp lambda=" + std::to_string(lam).substr(0, 4);
    check(tag + " fp vs closed", kolmogorov_distance(fp, closed), 1e-4);
    check(tag + " ode vs closed", kolmogorov_distance(ode, closed), 1e-8);
    const auto resp = response_ccdf(fp, ex, 2);
    const auto resp_closed = CcdfCurve::tabulate(fp.h, fp.size(), [&](double s) {
      return ll_response_ccdf_exp(p, s);
    });
    check(tag + " response vs closed", kolmogorov_distance(resp, resp_closed), 1e-4);
    SimConfig cfg;
    cfg.N = 500;
    cfg.lambda = lam;
    cfg.horizon = 2000.0;
    cfg.runs = 4;
    const auto sim = run_replicated(cfg);
    check(tag + " sim mean vs closed (relative)",
          std::abs(sim.mean_response / ll_mean_response(p).value - 1.0), 0.02);
  }
  const std::vector<std::pair<std::string, JobSizeLaw>> laws = {
      {"hexp(scv=4,f=0.5)", fit_hyperexp({1.0, 4.0, 0.5})},
      {"erlang(k=3)", JobSizeLaw(ErlangK{3, 3.0})},
      {"det(c=1)", JobSizeLaw(Deterministic{1.0})},
      {"detph(tau=0.05,hexp(scv=4))", JobSizeLaw(DetPlusPh{0.05, as_ph(fit_hyperexp({1.0, 4.0, 0.5}))})},
  };
  for (const auto& [name, law] : laws) {
    const auto p = ModelParams::for_law(0.8, 2, law);
    StationaryOptions so;
    so.h = 1e-3;
    const auto fp = solve_stationary(law, p, so).curve;
    check(name + " fp vs ode", kolmogorov_distance(fp, solve_workload_ode(law, p)), 1e-3);
  }
  out << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? kExitOk : kExitFailure;
}

// "--config path" is expanded into flags placed right after the
// subcommand, so explicit flags (parsed later) win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app,
                                       std::ostream& err) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty() || out.size() < 2) return out;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands({})) {
    if (s->get_name() == out[1]) sub = s;
  }
  if (!sub) return out;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_flat_config(path)) {
    const std::string flag = "--" + key;
    if (sub->get_option_no_throw(flag) == nullptr) {
      err << "config: ignoring key '" << key << "' (not used by " << out[1] << ")\n";
      continue;
    }
    injected.push_back(flag);
    injected.push_back(value);
  }
  out.insert(out.begin() + 2, injected.begin(), injected.end());
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-field workload and response times of least-loaded-of-d load balancing"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string out_path;

  ModelFlags wl_model;
  SolverFlags wl_solver;
  std::string wl_compare;
  auto* wl = app.add_subcommand("workload", "stationary workload ccdf as CSV s,ccdf");
  wl_model.add(wl);
  wl_solver.add(wl);
  wl->add_option("--compare", wl_compare, "second method; prints d_K between the two")
      ->check(CLI::IsMember({"closed", "fp", "ode"}));
  wl->add_option("--out", out_path, "output file (default: standard output)");

  ModelFlags rs_model;
  SolverFlags rs_solver;
  std::string rs_policy = "ll";
  auto* rs = app.add_subcommand("response", "FCFS response-time ccdf as CSV s,ccdf");
  rs_model.add(rs);
  rs_solver.add(rs);
  rs->add_option("--policy", rs_policy, "ll | sq")->check(CLI::IsMember({"ll", "sq"}));
  rs->add_option("--out", out_path, "output file");

  std::string sw_law = "exp(rate=1)";
  std::vector<double> sw_lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  std::vector<int> sw_ds = {2};
  double sw_h = 1e-3;
  auto* sw = app.add_subcommand("ratio-sweep", "CSV lambda,d,T_sq,T_ll,ratio");
  sw->add_option("--law,--jobsize", sw_law, "job-size law");
  sw->add_option("--lambdas", sw_lambdas, "comma-separated arrival rates")->delimiter(',');
  sw->add_option("--d", sw_ds, "comma-separated d values")->delimiter(',');
  sw->add_option("--step", sw_h, "ODE step");
  sw->add_option("--out", out_path, "output file");

  std::string tf_law = "hexp(scv=20,f=0.5)";
  std::vector<double> tf_lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int tf_d = 2;
  double tf_tol = 1e-4;
  double tf_h = 1e-3;
  auto* tf = app.add_subcommand("tau-frontier", "CSV lambda,tau_max");
  tf->add_option("--law,--jobsize", tf_law, "job-size law before the overhead (PH form)");
  tf->add_option("--lambdas", tf_lambdas, "comma-separated arrival rates")->delimiter(',');
  tf->add_option("--d", tf_d, "number of sampled servers");
  tf->add_option("--tol", tf_tol, "bisection tolerance on tau");
  tf->add_option("--step", tf_h, "largest ODE step");
  tf->add_option("--out", out_path, "output file");

  ModelFlags sm_model;
  SimFlags sm;
  auto* si = app.add_subcommand("simulate", "finite-N simulation; CSV s,ccdf[,limit]");
  sm_model.add(si);
  si->add_option("--N", sm.N, "number of servers");
  si->add_option("--policy", sm.policy, "ll | sq")->check(CLI::IsMember({"ll", "sq"}));
  si->add_option("--tau", sm.tau, "overhead added to each LL job");
  si->add_option("--horizon", sm.horizon, "simulated time (0: 1e7/N)");
  si->add_option("--warmup", sm.warmup, "fraction of the horizon discarded");
  si->add_option("--runs", sm.runs, "replications");
  si->add_option("--seed", sm.seed, "base seed");
  si->add_option("--step", sm.h, "ccdf grid step");
  si->add_option("--smax", sm.smax, "ccdf grid end");
  si->add_option("--overlay", sm.overlay, "add limiting curve: closed | ode | fp")
      ->check(CLI::IsMember({"closed", "ode", "fp"}));
  si->add_option("--out", out_path, "output file; the summary goes to <out>.summary");

  ModelFlags tr_model;
  double tr_h = 1e-3;
  double tr_dt = 1e-3;
  double tr_smax = 0.0;
  std::vector<double> tr_times = {0.0, 1.0, 5.0, 10.0, 25.0, 50.0};
  auto* tr = app.add_subcommand("transient", "ccdf over time from the empty system, CSV t,s,ccdf");
  tr_model.add(tr);
  tr->add_option("--step", tr_h, "grid step");
  tr->add_option("--dt", tr_dt, "time step (must equal --step)");
  tr->add_option("--smax", tr_smax, "grid end (0: automatic)");
  tr->add_option("--times", tr_times, "comma-separated time stamps")->delimiter(',');
  tr->add_option("--out", out_path, "output file");

  auto* st = app.add_subcommand("selftest", "cross-method oracle matrix");

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args, app, err);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (wl->parsed()) return cmd_workload(wl_model, wl_solver, out_path, wl_compare, out, err);
    if (rs->parsed()) return cmd_response(rs_model, rs_solver, rs_policy, out_path, out, err);
    if (sw->parsed()) return cmd_ratio_sweep(sw_law, sw_lambdas, sw_ds, sw_h, out_path, out);
    if (tf->parsed()) {
      return cmd_tau_frontier(tf_law, tf_lambdas, tf_d, tf_tol, tf_h, out_path, out, err);
    }
    if (si->parsed()) return cmd_simulate(sm_model, sm, out_path, out, err);
    if (tr->parsed()) {
      return cmd_transient(tr_model, tr_h, tr_dt, tr_smax, tr_times, out_path, out, err);
    }
    if (st->parsed()) return cmd_selftest(out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::runtime_error& e) {
    // Numerical failures: truncation limits, non-monotone ODE steps.
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace llmf
