#pragma once

#include <cstddef>
#include <vector>

#include "llmf/jobsize.hpp"

namespace llmf {

/// law.ccdf_mid(i h) for i < n. Phase-type parts are propagated with the
/// one-step matrix exp(A h) instead of a matrix exponential per point.
std::vector<double> tabulate_ccdf_mid(const JobSizeLaw& law, double h, std::size_t n);

/// law.pdf_mid(i h) for i < n, same propagation.
std::vector<double> tabulate_pdf_mid(const JobSizeLaw& law, double h, std::size_t n);

/// Left limits of the ccdf / density at i h: they differ from the _mid
/// tables only at an atom (Deterministic) or a density jump (PowerLaw smin,
/// DetPlusPh tau). The trapezoid rule needs these at the far end of the
/// integration range, where the kernel is approached from one side.
std::vector<double> tabulate_ccdf_left(const JobSizeLaw& law, double h, std::size_t n);
std::vector<double> tabulate_pdf_left(const JobSizeLaw& law, double h, std::size_t n);

}  // namespace llmf
