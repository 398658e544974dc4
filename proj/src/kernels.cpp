#include "llmf/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace llmf {

namespace {

// Row vectors alpha exp(A (s0 + i h)) for i < n, s0 >= 0.
template <typename Out>
void propagate(const PhRep& ph, double s0, double h, std::size_t n, Out&& out) {
  const Eigen::MatrixXd step = (ph.A * h).exp();
  Eigen::RowVectorXd v = ph.alpha * (ph.A * s0).exp();
  for (std::size_t i = 0; i < n; ++i) {
    out(i, v);
    v = v * step;
  }
}

const PhRep* general_ph(const JobSizeLaw& law, double& shift) {
  shift = 0.0;
  if (law.is<PhaseType>()) return &law.as<PhaseType>().ph;
  if (law.is<DetPlusPh>()) {
    shift = law.as<DetPlusPh>().tau;
    return &law.as<DetPlusPh>().ph;
  }
  return nullptr;
}

// First grid index strictly right of the shift.
std::size_t first_after(double shift, double h, std::size_t n) {
  std::size_t i = 0;
  while (i < n && static_cast<double>(i) * h <= shift * (1.0 + 1e-12)) ++i;
  return i;
}

}  // namespace

std::vector<double> tabulate_ccdf_mid(const JobSizeLaw& law, double h, std::size_t n) {
  std::vector<double> out(n);
  double shift = 0.0;
  const PhRep* ph = general_ph(law, shift);
  if (!ph) {
    for (std::size_t i = 0; i < n; ++i) out[i] = law.ccdf_mid(static_cast<double>(i) * h);
    return out;
  }
  const std::size_t i0 = first_after(shift, h, n);
  for (std::size_t i = 0; i < i0; ++i) out[i] = 1.0;
  if (i0 == n) return out;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ph->phases());
  propagate(*ph, static_cast<double>(i0) * h - shift, h, n - i0,
            [&](std::size_t i, const Eigen::RowVectorXd& v) { out[i0 + i] = v.dot(ones); });
  return out;
}

std::vector<double> tabulate_pdf_mid(const JobSizeLaw& law, double h, std::size_t n) {
  std::vector<double> out(n);
  double shift = 0.0;
  const PhRep* ph = general_ph(law, shift);
  if (!ph) {
    for (std::size_t i = 0; i < n; ++i) out[i] = law.pdf_mid(static_cast<double>(i) * h);
    return out;
  }
  const std::size_t i0 = first_after(shift, h, n);
  for (std::size_t i = 0; i < i0; ++i) out[i] = 0.0;
  // The grid point at the shift itself carries the one-sided average.
  if (i0 > 0) out[i0 - 1] = law.pdf_mid(static_cast<double>(i0 - 1) * h);
  if (i0 == n) return out;
  const Eigen::VectorXd t = ph->exit_rates();
  propagate(*ph, static_cast<double>(i0) * h - shift, h, n - i0,
            [&](std::size_t i, const Eigen::RowVectorXd& v) { out[i0 + i] = v.dot(t); });
  return out;
}

namespace {

// Grid index of x if x lies on the grid, otherwise n.
std::size_t grid_index(double x, double h, std::size_t n) {
  const double k = std::round(x / h);
  if (k < 0.0 || k >= static_cast<double>(n)) return n;
  if (std::abs(k * h - x) > 1e-9 * std::max(1.0, x)) return n;
  return static_cast<std::size_t>(k);
}

}  // namespace

std::vector<double> tabulate_ccdf_left(const JobSizeLaw& law, double h, std::size_t n) {
  auto out = tabulate_ccdf_mid(law, h, n);
  if (law.is<Deterministic>()) {
    const std::size_t i = grid_index(law.as<Deterministic>().c, h, n);
    if (i < n) out[i] = 1.0;
  }
  return out;
}

std::vector<double> tabulate_pdf_left(const JobSizeLaw& law, double h, std::size_t n) {
  auto out = tabulate_pdf_mid(law, h, n);
  std::size_t i = n;
  if (law.is<PowerLaw>()) i = grid_index(law.as<PowerLaw>().smin, h, n);
  if (law.is<DetPlusPh>() && law.as<DetPlusPh>().tau > 0.0) {
    i = grid_index(law.as<DetPlusPh>().tau, h, n);
  }
  if (i < n) out[i] = 0.0;
  return out;
}

}  // namespace llmf
