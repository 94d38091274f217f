#include "arrayfix/cp_correction.hpp"

#include <chrono>
#include <cmath>

#include "arrayfix/errors.hpp"
#include "arrayfix/taper.hpp"

namespace arrayfix {

const char* to_string(TraceEvent event) {
  switch (event) {
    case TraceEvent::kAccepted:
      return "accepted";
    case TraceEvent::kBacktracked:
      return "backtracked";
    case TraceEvent::kConverged:
      return "converged";
  }
  return "unknown";
}

std::optional<std::size_t> least_important(const Excitations& delta,
                                           std::span<const std::uint8_t> required,
                                           double zero_threshold) {
  if (required.size() != delta.size()) throw InvalidArgument("least_important: length mismatch");
  std::optional<std::size_t> best;
  double best_mag = 0.0;
  for (std::size_t n = 0; n < delta.size(); ++n) {
    const double mag = std::abs(delta[n]);
    if (mag <= zero_threshold || required[n]) continue;
    if (!best || mag < best_mag) {
      best = n;
      best_mag = mag;
    }
  }
  return best;
}

Excitations make_trial(const Excitations& delta, std::size_t n_least) {
  if (n_least >= delta.size()) throw InvalidArgument("make_trial: index out of range");
  Excitations trial = delta;
  trial.set(n_least, 0.0);
  return trial;
}

namespace {

ZeroMask combined_mask(const FailureScenario& scenario, std::span<const std::uint8_t> s) {
  std::vector<std::uint8_t> mask(scenario.size());
  for (std::size_t n = 0; n < mask.size(); ++n) mask[n] = (scenario.is_faulty(n) || s[n]) ? 1 : 0;
  return ZeroMask(std::move(mask));
}

}  // namespace

CorrectionResult cp_correct(const ArrayGeometry& geometry, const Excitations& original,
                            const FailureScenario& scenario, const MetricSpec& metric,
                            const SolverConfig& config, const CpOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = geometry.size();
  if (original.size() != n || scenario.size() != n) {
    throw InvalidArgument("cp_correct: length mismatch");
  }
  scenario.require_reconfigurable();
  config.validate();
  metric.validate();

  const Excitations faulty = apply_failures(original, scenario);
  const int cap = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(4 * n);

  CorrectionResult result;
  CorrectionState state;
  state.required.assign(n, 0);
  state.non_required.assign(n, 0);

  auto phi = [&](const Excitations& delta) {
    return evaluate_metric(geometry, faulty + delta, metric);
  };
  auto record = [&](int step, std::optional<std::size_t> n_least, TraceEvent event,
                    bool resolved, bool with_figures) {
    TraceEntry entry;
    entry.k = state.k;
    entry.step = step;
    entry.n_least = n_least;
    entry.event = event;
    entry.resolved = resolved;
    if (with_figures) {
      entry.l0 = l0_norm(state.delta_opt, config.zero_threshold);
      entry.l1 = l1_norm(state.delta_opt);
      entry.phi_db = phi(state.delta_opt);
    }
    entry.required = state.required;
    entry.non_required = state.non_required;
    state.trace.push_back(std::move(entry));
  };

  // Step 0: minimum-l1 correction over all working elements.
  state.delta_opt = solve_constrained_l1(metric, ZeroMask::from_failures(scenario),
                                         Excitations::zeros(n), config, geometry, faulty);
  ++result.solver_calls;
  record(0, std::nullopt, TraceEvent::kAccepted, true, true);

  while (true) {
    ++state.k;
    if (state.k > cap) {
      result.iteration_cap_hit = true;
      --state.k;
      break;
    }
    // Step 1: guess the least important correction.
    const auto n_least = options.rule(state.delta_opt, state.required, config.zero_threshold);
    if (!n_least) {
      record(1, std::nullopt, TraceEvent::kConverged, false, true);
      break;
    }
    const std::size_t idx = *n_least;
    if (scenario.is_faulty(idx)) throw ConstraintViolation("rule selected a failed element");
    state.non_required[idx] = 1;
    const Excitations trial = make_trial(state.delta_opt, idx);

    // Step 2: keep the trial if it already meets the target, otherwise
    // re-optimize the remaining corrections starting from it.
    bool accepted = false;
    bool resolved = false;
    try {
      if (phi(trial) <= metric.target_db) {
        state.delta_opt = trial;
        accepted = true;
      }
    } catch (const DegenerateBroadside&) {
    }
    if (!accepted) {
      const ZeroMask mask = combined_mask(scenario, state.non_required);
      if (mask.free_count() > 0) {
        try {
          ++result.solver_calls;
          state.delta_opt = solve_constrained_l1(metric, mask, trial, config, geometry, faulty);
          accepted = true;
          resolved = true;
        } catch (const Infeasible&) {
        }
      }
    }

    if (accepted) {
      std::fill(state.required.begin(), state.required.end(), std::uint8_t{0});
      record(2, idx, TraceEvent::kAccepted, resolved, true);
    } else {
      // Step 3: backtrack.
      state.non_required[idx] = 0;
      state.required[idx] = 1;
      record(3, idx, TraceEvent::kBacktracked, false, false);
    }
  }

  result.delta_opt = state.delta_opt;
  result.n_corrections = l0_norm(state.delta_opt, config.zero_threshold);
  result.l1 = l1_norm(state.delta_opt);
  result.achieved_phi_db = phi(state.delta_opt);
  result.k_opt = state.k;
  result.required = state.required;
  result.non_required = state.non_required;
  result.trace = std::move(state.trace);
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace arrayfix
