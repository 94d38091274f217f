#include "arrayfix/exhaustive.hpp"

#include <chrono>
#include <numeric>

#include "arrayfix/errors.hpp"
#include "arrayfix/taper.hpp"

namespace arrayfix {

namespace {

// Advances a sorted combination of positions into [0, pool) in
// lexicographic order. Returns false after the last one.
bool next_combination(std::vector<std::size_t>& pick, std::size_t pool) {
  const std::size_t m = pick.size();
  for (std::size_t i = m; i-- > 0;) {
    if (pick[i] < pool - m + i) {
      ++pick[i];
      for (std::size_t j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

OracleResult exhaustive_min(const ArrayGeometry& geometry, const Excitations& original,
                            const FailureScenario& scenario, const MetricSpec& metric,
                            const SolverConfig& config, const OracleOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = geometry.size();
  if (original.size() != n || scenario.size() != n) {
    throw InvalidArgument("exhaustive_min: length mismatch");
  }
  scenario.require_reconfigurable();
  config.validate();
  metric.validate();
  const auto working = scenario.working_indices();
  const int limit = options.max_support < 0 ? static_cast<int>(working.size())
                                            : options.max_support;
  if (limit > static_cast<int>(working.size())) {
    throw InvalidArgument("exhaustive_min: max_support exceeds reconfigurable count");
  }

  const Excitations faulty = apply_failures(original, scenario);
  OracleResult out;

  auto finish = [&](Excitations delta, std::vector<std::size_t> support) {
    CorrectionResult r;
    r.n_corrections = l0_norm(delta, config.zero_threshold);
    r.l1 = l1_norm(delta);
    r.achieved_phi_db = evaluate_metric(geometry, faulty + delta, metric);
    r.delta_opt = std::move(delta);
    r.solver_calls = static_cast<int>(out.solves);
    r.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.best = std::move(r);
    out.support = std::move(support);
  };

  // Size 0: the faulty array as is.
  if (meets_target(geometry, faulty, Excitations::zeros(n), metric, 0.0)) {
    finish(Excitations::zeros(n), {});
    return out;
  }

  for (int m = 1; m <= limit; ++m) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(m));
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    do {
      if (out.solves >= options.max_solves) {
        throw BudgetExceeded("exhaustive search exceeded its solve budget");
      }
      std::vector<std::size_t> support(pick.size());
      for (std::size_t i = 0; i < pick.size(); ++i) support[i] = working[pick[i]];
      ++out.solves;
      try {
        auto delta = solve_constrained_l1(metric, ZeroMask::allowing(n, support),
                                          Excitations::zeros(n), config, geometry, faulty);
        out.searched_up_to = m;
        finish(std::move(delta), std::move(support));
        return out;
      } catch (const Infeasible&) {
      }
    } while (next_combination(pick, working.size()));
    out.searched_up_to = m;
  }
  return out;
}

}  // namespace arrayfix
