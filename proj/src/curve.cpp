#include "llmf/curve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace llmf {

double CcdfCurve::at(double s) const {
  if (values.empty()) return 0.0;
  if (s <= 0.0) return s < 0.0 ? 1.0 : values.front();
  const double x = s / h;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= values.size()) return values.back();
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

double kolmogorov_distance(const CcdfCurve& a, const CcdfCurve& b) {
  if (std::abs(a.h - b.h) > 1e-12 * std::max(a.h, b.h)) {
    throw std::invalid_argument("kolmogorov_distance: curves live on different grids");
  }
  const std::size_t n = std::min(a.size(), b.size());
  double dk = 0.0;
  for (std::size_t i = 0; i < n; ++i) dk = std::max(dk, std::abs(a.values[i] - b.values[i]));
  return dk;
}

bool is_valid_ccdf(const CcdfCurve& c, double tol) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double v = c.values[i];
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
    if (i > 0 && v > c.values[i - 1] + tol) return false;
  }
  return true;
}

void write_csv(std::ostream& os, const CcdfCurve& c) {
  os << "s,ccdf\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < c.size(); ++i) os << c.s(i) << ',' << c.values[i] << '\n';
}

CcdfCurve read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("s,ccdf", 0) != 0) {
    throw std::runtime_error("read_csv: expected header 's,ccdf'");
  }
  std::vector<double> s;
  std::vector<double> v;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("read_csv: malformed row: " + line);
    s.push_back(std::stod(line.substr(0, comma)));
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  if (s.size() < 2) return CcdfCurve(1e-3, std::move(v));
  const double h = s[1] - s[0];
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs(s[i] - h * static_cast<double>(i)) > 1e-9 * std::max(1.0, s[i])) {
      throw std::runtime_error("read_csv: grid is not uniform from 0");
    }
  }
  return CcdfCurve(h, std::move(v));
}

}  // namespace llmf
