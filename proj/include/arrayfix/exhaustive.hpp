#pragma once

// Ground-truth minimum correction count by enumerating supports.

#include <cstdint>
#include <optional>
#include <vector>

#include "arrayfix/cp_correction.hpp"

namespace arrayfix {

struct OracleOptions {
  int max_support = -1;                // -1: all working elements
  std::int64_t max_solves = 2'000'000;  // BudgetExceeded beyond this
};

struct OracleResult {
  /// Set when a feasible support of size <= searched_up_to was found.
  std::optional<CorrectionResult> best;
  std::vector<std::size_t> support;  // 0-based, sorted
  int searched_up_to = 0;            // largest support size fully examined
  std::int64_t solves = 0;

  bool feasible() const { return best.has_value(); }
};

/// Supports are visited by increasing size, lexicographically within a
/// size; the first feasible one is returned.
OracleResult exhaustive_min(const ArrayGeometry& geometry, const Excitations& original,
                            const FailureScenario& scenario, const MetricSpec& metric,
                            const SolverConfig& config, const OracleOptions& options = {});

}  // namespace arrayfix
