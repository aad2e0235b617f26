#pragma once

#include <string>
#include <vector>

namespace rabispec {

/// Outcome of one named invariant check.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the built-in invariant suite: parity commutator and selection rules,
/// Laguerre recurrence and closed-form residuals, displaced-overlap
/// unitarity, grid bias symmetry, eigenvector orthonormality, regime
/// boundary values, and the pinned classification table. Deterministic.
[[nodiscard]] std::vector<CheckResult> run_verification();

[[nodiscard]] bool all_passed(const std::vector<CheckResult>& results);

}  // namespace rabispec
