#pragma once

// Scenario files: one JSON object per correction experiment.
//
//   {
//     "name": "test_case_1",
//     "n_elements": 16,
//     "spacing_wavelengths": 0.5,
//     "taper": {"kind": "dolph_chebyshev", "sll_db": -15},
//     "faulty_indices": [2, 3, 9],
//     "metric": {"kind": "max_sidelobe", "target_db": -15},
//     "solver": {"constraint_tol_db": 0.02}
//   }
//
// Element indices are 1-based in files and 0-based everywhere else.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arrayfix/array_model.hpp"
#include "arrayfix/l1_solver.hpp"
#include "json.hpp"

namespace arrayfix {

struct TaperSpec {
  enum class Kind { kDolphChebyshev, kExplicit };
  Kind kind = Kind::kDolphChebyshev;
  double sll_db = -25.0;         // dolph_chebyshev only
  std::vector<Complex> weights;  // explicit only
};

struct MetricConfig {
  MetricKind kind = MetricKind::kMaxSidelobe;
  /// Defaults to the design SLL of a Dolph-Chebyshev taper.
  std::optional<double> target_db;
  /// Defaults to the beamwidth of an N_C-element Dolph-Chebyshev array at
  /// threshold = original SLL.
  std::optional<double> bw_target_deg;
  /// Explicit u samples; replaces the grid-minus-mainlobe region.
  std::optional<std::vector<double>> region;
  int grid_density = 2001;
};

struct SweepConfig {
  std::vector<double> targets_db;  // loosest first
};

struct ScenarioSpec {
  std::string name;
  int n_elements = 0;
  double spacing_wavelengths = 0.5;
  TaperSpec taper;
  std::vector<int> faulty_indices;  // 1-based
  MetricConfig metric;
  SolverConfig solver;
  int cp_max_iterations = 0;
  std::optional<SweepConfig> sweep;

  void validate() const;
};

ScenarioSpec parse_scenario(const nlohmann::json& doc);
/// Throws InvalidArgument with the file name on read or parse errors.
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Everything the correction routines need, resolved from a spec.
struct Problem {
  ArrayGeometry geometry;
  Excitations original;
  FailureScenario scenario;
  MetricSpec metric;
  std::optional<double> bw_target_deg;
};

Problem build_problem(const ScenarioSpec& spec);

/// Beamwidth of an n-element half-wavelength Dolph-Chebyshev array measured
/// at its own sidelobe level.
double dolph_chebyshev_beamwidth(int element_count, double sll_db);

}  // namespace arrayfix
