#pragma once

#include <random>
#include <string>
#include <variant>

#include <Eigen/Dense>

namespace llmf {

using Rng = std::mt19937_64;

/// Uniform draw on the open interval (0, 1) using the top 53 bits.
double uniform_open01(Rng& rng);

/// Phase-type representation (alpha, A): the absorption time of a CTMC
/// started in phase i with probability alpha[i] and evolving under the
/// subgenerator A. The ccdf is alpha * exp(A s) * 1.
struct PhRep {
  Eigen::RowVectorXd alpha;
  Eigen::MatrixXd A;

  PhRep() = default;
  /// Validates stochasticity of alpha and the subgenerator structure of A.
  PhRep(Eigen::RowVectorXd alpha, Eigen::MatrixXd A);

  int phases() const { return static_cast<int>(alpha.size()); }
  /// Absorption rates t = -A * 1.
  Eigen::VectorXd exit_rates() const;
  double mean() const;
  double second_moment() const;
  double ccdf(double s) const;
  double pdf(double s) const;
  double sample(Rng& rng) const;
};

struct Exponential {
  double rate = 1.0;
};

struct HyperExp2 {
  double p = 0.5;
  double mu1 = 1.0;
  double mu2 = 1.0;
};

struct ErlangK {
  int k = 1;
  double rate = 1.0;
};

struct Deterministic {
  double c = 1.0;
};

/// ccdf (s / smin)^-beta on [smin, inf).
struct PowerLaw {
  double beta = 2.0;
  double smin = 1.0;
};

struct PhaseType {
  PhRep ph;
};

/// Deterministic offset tau followed by a phase-type amount.
struct DetPlusPh {
  double tau = 0.0;
  PhRep ph;
};

/// Hyperexponential fit targets: mean, squared coefficient of variation and
/// the fraction f of the workload carried by the short (type-1) jobs.
struct HexpFitSpec {
  double mean = 1.0;
  double scv = 1.0;
  double f = 0.5;
};

class JobSizeLaw {
 public:
  using Variant = std::variant<Exponential, HyperExp2, ErlangK, Deterministic,
                               PowerLaw, PhaseType, DetPlusPh>;

  JobSizeLaw() : law_(Exponential{}) {}
  // Each constructor validates the parameters and throws
  // std::invalid_argument on a malformed law.
  JobSizeLaw(Exponential v);
  JobSizeLaw(HyperExp2 v);
  JobSizeLaw(ErlangK v);
  JobSizeLaw(Deterministic v);
  JobSizeLaw(PowerLaw v);
  JobSizeLaw(PhaseType v);
  JobSizeLaw(DetPlusPh v);

  const Variant& variant() const { return law_; }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(law_);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(law_);
  }

  double cdf(double s) const { return 1.0 - ccdf(s); }
  /// P(G > s).
  double ccdf(double s) const;
  /// P(G >= s); differs from ccdf only at atoms.
  double ccdf_left(double s) const;
  /// Average of the one-sided limits of the ccdf at s. Quadrature rules use
  /// this so that a kernel jump on a grid point gets the trapezoid midpoint.
  double ccdf_mid(double s) const;
  /// Density of the absolutely continuous part; zero for Deterministic.
  double pdf(double s) const;
  /// Average of one-sided density limits at s (matters at smin / tau).
  double pdf_mid(double s) const;
  double mean() const;
  /// E[G^2]; +inf when the second moment diverges.
  double second_moment() const;
  double scv() const;

  double sample(Rng& rng) const;

  /// Short human-readable form in the config grammar, e.g. "exp(rate=1)".
  std::string describe() const;

 private:
  Variant law_;
};

/// Moment-matching hyperexponential fit (mean, SCV, shape fraction f).
/// Throws std::invalid_argument when scv < 1 or f is outside (0, 1).
JobSizeLaw fit_hyperexp(const HexpFitSpec& spec);

/// Canonical phase-type embedding of Exponential, HyperExp2, ErlangK and
/// PhaseType laws. Throws std::invalid_argument for laws without a finite
/// PH representation.
PhRep as_ph(const JobSizeLaw& law);

/// True when as_ph() succeeds for this law.
bool has_ph(const JobSizeLaw& law);

}  // namespace llmf
