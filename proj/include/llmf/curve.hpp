#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace llmf {

/// A complementary CDF sampled on the uniform grid s_i = i * h,
/// i = 0 .. values.size() - 1.
struct CcdfCurve {
  double h = 1e-3;
  std::vector<double> values;

  CcdfCurve() = default;
  CcdfCurve(double step, std::vector<double> v) : h(step), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double smax() const { return values.empty() ? 0.0 : h * static_cast<double>(values.size() - 1); }
  double s(std::size_t i) const { return h * static_cast<double>(i); }
  /// Linear interpolation; 1 left of the grid, the last value right of it.
  double at(double s) const;

  /// Builds a curve by evaluating fn on n grid points.
  template <typename Fn>
  static CcdfCurve tabulate(double step, std::size_t n, Fn&& fn) {
    CcdfCurve c(step, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) c.values[i] = fn(step * static_cast<double>(i));
    return c;
  }
};

/// Sup distance over the grid points the two curves share. Throws
/// std::invalid_argument when the grid steps differ.
double kolmogorov_distance(const CcdfCurve& a, const CcdfCurve& b);

/// True when the values are in [0,1] and nonincreasing within tol.
bool is_valid_ccdf(const CcdfCurve& c, double tol = 1e-12);

/// CSV with header "s,ccdf" and 17 significant digits per value.
void write_csv(std::ostream& os, const CcdfCurve& c);
/// Reads the format written by write_csv. Requires a uniform grid.
CcdfCurve read_csv(std::istream& is);

}  // namespace llmf
