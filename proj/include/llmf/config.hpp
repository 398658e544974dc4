#pragma once

#include <string>
#include <utility>
#include <vector>

#include "llmf/jobsize.hpp"

namespace llmf {

/// Parses a job-size law written as name(key=value, ...):
///   exp(rate=1)            hexp(scv=20, f=0.5, mean=1)   erlang(k=2, mean=1)
///   hexp(p=0.9, mu1=2, mu2=0.2)   det(c=1)   powerlaw(beta=2, smin=1)
///   ph(alpha=[0.5,0.5], A=[-1,0;0,-2])
///   detph(tau=0.05, inner=hexp(scv=20,f=0.5))
/// Bare names use the defaults (exp, det, erlang default to mean 1).
/// Throws std::invalid_argument with a message naming the problem.
JobSizeLaw parse_law(const std::string& text);

/// Reads "key = value" lines; blank lines and lines starting with '#' are
/// skipped. Keys keep their order of appearance.
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path);

}  // namespace llmf
