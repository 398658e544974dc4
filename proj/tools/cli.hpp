#pragma once

#include <iosfwd>

#include "llmf/jobsize.hpp"

namespace llmf {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,       ///< selftest breach or unexpected error
  kExitInvalid = 2,       ///< bad flags, config, or parameters (e.g. rho >= 1)
  kExitNoConvergence = 3, ///< a solver did not converge
};

/// Entry point of the llmf tool, with output streams injected so tests can
/// drive it in-process. argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Largest overhead tau such that LL(d) with jobs of size tau + G has a mean
/// response no larger than SQ(d) with jobs G, found by bisection to tol.
/// G must have a phase-type form. Returns 0 (and writes a warning to err) if
/// LL is already worse at tau = 0.
double tau_frontier_point(const JobSizeLaw& law, double lambda, int d, double tol, double h,
                          std::ostream& err);

}  // namespace llmf
