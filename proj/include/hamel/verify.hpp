#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hamel/spectral.hpp"

namespace hamel {

/// Outcome of one verification check. Informational checks never fail a run.
struct CheckResult {
  std::string name;
  bool passed = false;
  bool informational = false;
  std::string summary;
  std::vector<std::pair<std::string, double>> metrics;
  double seconds = 0.0;
};

/// Largest interior relative residual of the two mode equations
/// gamma'' + gamma'/r - n^2 gamma/r^2 + w = 0 and
/// w'' + (flux+1) w'/r - (n^2 + i n mu) w/r^2 - F = 0, with derivatives by
/// finite differences of the stored samples.
double mode_ode_residual(const RadialGrid& grid, const ReferenceFlow& flow, int n, const ComplexArray& gamma,
                         const ComplexArray& w, const ComplexArray& dw, const ComplexArray& source);

CheckResult check_existence_threshold();
CheckResult check_exponent_identities();
CheckResult check_manufactured_oracles();
CheckResult check_ode_residuals(std::uint64_t seed);
CheckResult check_branch_nonuniqueness();
CheckResult check_shooting_scaling();
CheckResult check_decay_rates();
CheckResult check_hardy_suite(std::uint64_t seed, int profiles);
CheckResult check_poincare_suite(std::uint64_t seed, int streams);
CheckResult check_qform_suite(std::uint64_t seed, int streams);
CheckResult check_ns_refinement();
/// Searches for a mode-1 stream with negative q_1; informational.
CheckResult check_q1_probe(double flux, int samples, std::uint64_t seed);

}  // namespace hamel
