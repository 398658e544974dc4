#pragma once

#include <memory>
#include <vector>

#include "llmf/curve.hpp"
#include "llmf/jobsize.hpp"
#include "llmf/model.hpp"

namespace llmf {

/// Explicit time stepping of the cavity-process workload law. The state is
/// an atom P(W = 0) plus cell masses for the cells ((i - 1/2) h, (i + 1/2) h],
/// i = 1 .. n-1; one step of length dt = h moves every cell one cell down
/// (work drains at rate 1) and adds the arrivals that join during the step.
class TransientSolver {
 public:
  /// Starts from the empty system (atom 1). Throws std::invalid_argument if
  /// dt != h, or for rho >= 1.
  TransientSolver(const JobSizeLaw& law, const ModelParams& p, double h, double dt, double smax);
  ~TransientSolver();
  TransientSolver(const TransientSolver&) = delete;
  TransientSolver& operator=(const TransientSolver&) = delete;

  void step();
  double time() const { return time_; }
  double atom() const { return atom_; }
  /// atom + sum of cell masses; exceeds 1 only through round-off.
  double total_mass() const;
  /// Ccdf on the grid s_i = i h (value at 0 is 1 - atom).
  CcdfCurve ccdf() const;

 private:
  struct Impl;
  ModelParams p_;
  double h_;
  double time_ = 0.0;
  double atom_ = 1.0;
  std::vector<double> mass_;  // mass_[i] for cell i; mass_[0] unused
  std::unique_ptr<Impl> impl_;
};

struct TransientResult {
  std::vector<double> times;
  std::vector<CcdfCurve> curves;
  double max_mass_error = 0.0;   ///< max over steps of |total mass - 1|
};

/// Runs from the empty system to the last stamp and records the ccdf at
/// each stamp (rounded to whole steps). Stamps must be nonnegative and
/// sorted.
TransientResult evolve_transient(const JobSizeLaw& law, const ModelParams& p, double h, double dt,
                                 double smax, const std::vector<double>& stamps);

}  // namespace llmf
