#pragma once

// Backtracking search for a sparse correction vector.
//
// Starting from the minimum-l1 correction on all working elements, the loop
// repeatedly drops the least important correction, re-optimizes the rest
// when the pattern no longer meets the target, and restores the dropped
// correction (marking it required) when re-optimization fails.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "arrayfix/array_model.hpp"
#include "arrayfix/l1_solver.hpp"

namespace arrayfix {

enum class TraceEvent { kAccepted, kBacktracked, kConverged };

const char* to_string(TraceEvent event);

struct TraceEntry {
  int k = 0;
  int step = 0;  // 0 init, 1 converged at guess, 2 removal accepted, 3 backtrack
  std::optional<std::size_t> n_least;  // 0-based
  TraceEvent event = TraceEvent::kAccepted;
  bool resolved = false;  // acceptance needed an l1 re-solve
  // Best-solution figures; set for accepted and converged entries only.
  std::optional<int> l0;
  std::optional<double> l1;
  std::optional<double> phi_db;
  std::vector<std::uint8_t> required;
  std::vector<std::uint8_t> non_required;
};

struct CorrectionState {
  int k = 0;
  Excitations delta_opt;
  std::vector<std::uint8_t> required;      // r
  std::vector<std::uint8_t> non_required;  // s
  std::vector<TraceEntry> trace;
};

struct CorrectionResult {
  Excitations delta_opt;
  int n_corrections = 0;
  double l1 = 0.0;
  double achieved_phi_db = 0.0;
  int k_opt = 0;
  std::vector<std::uint8_t> required;
  std::vector<std::uint8_t> non_required;
  std::vector<TraceEntry> trace;
  double elapsed_seconds = 0.0;
  bool iteration_cap_hit = false;
  int solver_calls = 0;
};

/// Picks the correction to drop next. Arguments: current best correction,
/// required flags, zero threshold.
using LeastImportanceRule = std::function<std::optional<std::size_t>(
    const Excitations&, std::span<const std::uint8_t>, double)>;

/// Smallest |dw_n| above zero_threshold among entries not marked required;
/// ties go to the lowest index.
std::optional<std::size_t> least_important(const Excitations& delta,
                                           std::span<const std::uint8_t> required,
                                           double zero_threshold);

/// Copy of delta with entry n_least zeroed.
Excitations make_trial(const Excitations& delta, std::size_t n_least);

struct CpOptions {
  LeastImportanceRule rule = least_important;
  /// Hard cap on CP iterations; 0 means 4*N.
  int max_iterations = 0;
};

/// Throws Infeasible when the initial full-support solve fails.
CorrectionResult cp_correct(const ArrayGeometry& geometry, const Excitations& original,
                            const FailureScenario& scenario, const MetricSpec& metric,
                            const SolverConfig& config, const CpOptions& options = {});

}  // namespace arrayfix
