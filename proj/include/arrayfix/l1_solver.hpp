#pragma once

// Minimum-l1 correction under a sidelobe constraint.
//
//   minimize   sum_n |dw_n|
//   subject to |F(u_i)| <= c * |F(0)|  for every region sample u_i,
//              dw_n = 0 wherever the zero mask is set,
//
// with F the pattern of faulty + dw and c = 10^(target/20). Replacing |F(0)|
// by Re(exp(-j phi) F(0)) turns every constraint into a second-order cone;
// for real weights (phi = 0) this is exact, for complex weights the phase is
// re-linearized until it settles. The cone program is solved by a primal
// log-barrier interior-point method with damped Newton steps, preceded by a
// phase-I search for a strictly feasible point when the start is infeasible.

#include <cstdint>
#include <span>
#include <vector>

#include "arrayfix/array_model.hpp"

namespace arrayfix {

enum class CorrectionDomain {
  kAutomatic,  // real when faulty weights and start are real
  kReal,
  kComplex,
};

struct SolverConfig {
  int max_iterations = 500;            // Newton steps per solve
  double min_step = 1e-10;             // stop centering below this step norm
  double optimality_tol = 1e-6;        // duality-gap bound at exit
  double constraint_tol_db = 0.02;     // metric slack accepted as feasible
  double zero_threshold = 1e-12;       // |dw| above this counts as a correction
  double barrier_initial = 1.0;
  double barrier_growth = 10.0;
  double broadside_floor = 1e-3;       // Re F(0) >= floor * sum|faulty|
  int max_linearizations = 25;         // complex domain only
  CorrectionDomain domain = CorrectionDomain::kAutomatic;

  void validate() const;
};

/// Entries where corrections are forbidden (failed or non-required).
class ZeroMask {
 public:
  explicit ZeroMask(std::vector<std::uint8_t> mask);
  static ZeroMask from_failures(const FailureScenario& scenario);
  /// Ones everywhere except at the 0-based indices in support.
  static ZeroMask allowing(std::size_t n, std::span<const std::size_t> support);

  std::size_t size() const { return mask_.size(); }
  bool is_masked(std::size_t n) const { return mask_[n] != 0; }
  std::span<const std::uint8_t> mask() const { return mask_; }
  std::vector<std::size_t> free_indices() const;
  std::size_t free_count() const;

  ZeroMask with_masked(std::size_t n) const;

 private:
  std::vector<std::uint8_t> mask_;
};

double l1_norm(const Excitations& delta);
int l0_norm(const Excitations& delta, double zero_threshold);

enum class SolveStatus {
  kConverged,       // duality gap below optimality_tol
  kIterationLimit,  // stopped by max_iterations with a feasible iterate
  kMinStep,         // stopped by min_step with a feasible iterate
  kStartFeasible,   // zero start already met the target
};

struct SolveReport {
  Excitations delta;
  SolveStatus status = SolveStatus::kConverged;
  int newton_steps = 0;
  int phase1_steps = 0;
  double gap = 0.0;
  double achieved_db = 0.0;
};

/// Throws Infeasible when no strictly feasible point exists for the target,
/// NumericalFailure on non-finite data, InvalidArgument on bad inputs
/// (including a mask without free entries).
SolveReport solve_constrained_l1_report(const MetricSpec& metric, const ZeroMask& mask,
                                        const Excitations& start, const SolverConfig& config,
                                        const ArrayGeometry& geometry, const Excitations& faulty);

inline Excitations solve_constrained_l1(const MetricSpec& metric, const ZeroMask& mask,
                                        const Excitations& start, const SolverConfig& config,
                                        const ArrayGeometry& geometry,
                                        const Excitations& faulty) {
  return solve_constrained_l1_report(metric, mask, start, config, geometry, faulty).delta;
}

/// Phi(dw) <= target + constraint_tol, treating a vanishing broadside as a
/// failure rather than an error.
bool meets_target(const ArrayGeometry& geometry, const Excitations& faulty,
                  const Excitations& delta, const MetricSpec& metric, double constraint_tol_db);

}  // namespace arrayfix
