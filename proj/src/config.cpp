#include "llmf/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace llmf {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_number(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw std::invalid_argument("law parameter '" + key + "' is not a number: '" + v + "'");
  }
  return out;
}

// Splits "a=1, b=[1,2], inner=f(x=1)" at top-level commas.
std::map<std::string, std::string> split_args(const std::string& body, const std::string& law) {
  std::map<std::string, std::string> args;
  int depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    const std::string item = trim(body.substr(start, end - start));
    if (item.empty()) return;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(law + ": expected key=value, got '" + item + "'");
    }
    const std::string key = trim(item.substr(0, eq));
    if (!args.emplace(key, trim(item.substr(eq + 1))).second) {
      throw std::invalid_argument(law + ": duplicate parameter '" + key + "'");
    }
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (depth < 0) throw std::invalid_argument(law + ": unbalanced brackets");
    if (c == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  if (depth != 0) throw std::invalid_argument(law + ": unbalanced brackets");
  flush(body.size());
  return args;
}

class Args {
 public:
  Args(std::string law, std::map<std::string, std::string> a) : law_(std::move(law)), a_(std::move(a)) {}

  double number(const std::string& key, double fallback) {
    const auto it = a_.find(key);
    if (it == a_.end()) return fallback;
    const double v = to_number(key, it->second);
    a_.erase(it);
    return v;
  }
  bool has(const std::string& key) const { return a_.count(key) > 0; }
  std::string take(const std::string& key) {
    const auto it = a_.find(key);
    if (it == a_.end()) throw std::invalid_argument(law_ + ": missing parameter '" + key + "'");
    std::string v = it->second;
    a_.erase(it);
    return v;
  }
  void done() const {
    if (!a_.empty()) {
      throw std::invalid_argument(law_ + ": unknown parameter '" + a_.begin()->first + "'");
    }
  }

 private:
  std::string law_;
  std::map<std::string, std::string> a_;
};

// "[1, 2; 3, 4]" -> rows of numbers.
std::vector<std::vector<double>> parse_matrix(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw std::invalid_argument("parameter '" + key + "' must be written as [a,b;c,d]");
  }
  std::vector<std::vector<double>> rows(1);
  std::string cell;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const char c = v[i];
    if (c == ',' || c == ';') {
      rows.back().push_back(to_number(key, cell));
      cell.clear();
      if (c == ';') rows.emplace_back();
    } else {
      cell += c;
    }
  }
  rows.back().push_back(to_number(key, cell));
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) {
      throw std::invalid_argument("parameter '" + key + "' has rows of different length");
    }
  }
  return rows;
}

PhRep parse_ph_args(Args& args) {
  const auto alpha_rows = parse_matrix("alpha", args.take("alpha"));
  const auto a_rows = parse_matrix("A", args.take("A"));
  if (alpha_rows.size() != 1) throw std::invalid_argument("ph: alpha must be a single row");
  const auto n = static_cast<Eigen::Index>(alpha_rows[0].size());
  if (static_cast<Eigen::Index>(a_rows.size()) != n ||
      static_cast<Eigen::Index>(a_rows[0].size()) != n) {
    throw std::invalid_argument("ph: A must be square with the size of alpha");
  }
  Eigen::RowVectorXd alpha(n);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    alpha[i] = alpha_rows[0][static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = a_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return PhRep(alpha, a);
}

}  // namespace

JobSizeLaw parse_law(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  std::string name = trim(t.substr(0, open));
  std::string body;
  if (open != std::string::npos) {
    if (t.back() != ')') throw std::invalid_argument("law '" + t + "': missing ')'");
    body = t.substr(open + 1, t.size() - open - 2);
  }
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  Args args(name, split_args(body, name));

  JobSizeLaw law;
  if (name == "exp") {
    law = JobSizeLaw(Exponential{args.number("rate", 1.0)});
  } else if (name == "hexp" && (args.has("p") || args.has("mu1") || args.has("mu2"))) {
    const double p = args.number("p", 0.5);
    const double mu1 = args.number("mu1", 1.0);
    const double mu2 = args.number("mu2", 1.0);
    law = JobSizeLaw(HyperExp2{p, mu1, mu2});
  } else if (name == "hexp") {
    HexpFitSpec spec;
    spec.scv = args.number("scv", 1.0);
    spec.f = args.number("f", 0.5);
    spec.mean = args.number("mean", 1.0);
    law = fit_hyperexp(spec);
  } else if (name == "erlang") {
    const double k = args.number("k", 1.0);
    if (k < 1.0 || k != std::floor(k)) throw std::invalid_argument("erlang: k must be a positive integer");
    const double rate = args.has("rate") ? args.number("rate", 1.0) : k / args.number("mean", 1.0);
    law = JobSizeLaw(ErlangK{static_cast<int>(k), rate});
  } else if (name == "det") {
    law = JobSizeLaw(Deterministic{args.number("c", 1.0)});
  } else if (name == "powerlaw") {
    const double beta = args.number("beta", 2.0);
    law = JobSizeLaw(PowerLaw{beta, args.number("smin", 1.0)});
  } else if (name == "ph") {
    law = JobSizeLaw(PhaseType{parse_ph_args(args)});
  } else if (name == "detph") {
    const double tau = args.number("tau", 0.0);
    const JobSizeLaw inner = parse_law(args.take("inner"));
    law = JobSizeLaw(DetPlusPh{tau, as_ph(inner)});
  } else {
    throw std::invalid_argument("unknown job-size law '" + name + "'");
  }
  args.done();
  return law;
}

std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

}  // namespace llmf
