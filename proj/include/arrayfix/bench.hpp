#pragma once

// Experiment runner: scenario execution, oracle runs, target sweeps,
// failure-pattern scaling and batch summaries, plus the files they emit.
//
// Output files for a scenario named X, all under RunOptions::out_dir:
//   X.result.json   result record (no timing, byte-stable across runs)
//   X.pattern.csv   u, original_db, faulty_db, corrected_db
//   X.trace.csv     one row per CP trace entry
//   X.oracle.json   exhaustive search record
//   X.sweep.csv     target, status, n_corrections, achieved_db
//   X.frontier.csv  n_corrections, achieved_db

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arrayfix/cp_correction.hpp"
#include "arrayfix/exhaustive.hpp"
#include "arrayfix/scenario.hpp"
#include "json.hpp"

namespace arrayfix {

inline constexpr int kPatternGrid = 4001;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool write_files = true;
  std::optional<int> grid_density;         // overrides metric.grid_density
  std::optional<double> constraint_tol_db;  // overrides solver.constraint_tol_db
};

/// Applies the command-line overrides in options to a copy of spec.
ScenarioSpec with_overrides(const ScenarioSpec& spec, const RunOptions& options);

struct ArrayFigures {
  double sll_db = 0.0;            // max over the metric region
  std::optional<double> bw_deg;   // at threshold = target
  std::optional<double> hpbw_deg;
  double dynamic_range = 0.0;
};

ArrayFigures measure(const Problem& problem, const Excitations& weights);

enum class RunStatus { kOk, kInfeasible, kError };
const char* to_string(RunStatus status);

struct ScenarioOutcome {
  std::string name;
  RunStatus status = RunStatus::kOk;
  std::string message;
  int n_elements = 0;
  int n_failed = 0;
  int n_reconfigurable = 0;
  double target_db = 0.0;
  std::optional<double> bw_target_deg;
  std::optional<ArrayFigures> original;
  std::optional<ArrayFigures> faulty;
  std::optional<ArrayFigures> corrected;
  std::optional<CorrectionResult> correction;
  /// Largest corrected pattern value on the exported grid inside the
  /// constrained zone (|u| >= sin(bw_target/2), or the nearest grid point
  /// of each explicit region sample).
  std::optional<double> pattern_check_db;
  nlohmann::json record;
  double elapsed_seconds = 0.0;
};

/// Runs CP on a scenario. Infeasible targets come back with status
/// kInfeasible and a diagnostic record rather than an exception.
ScenarioOutcome run_scenario(const ScenarioSpec& spec, const RunOptions& options = {});

struct OracleOutcome {
  std::string name;
  RunStatus status = RunStatus::kOk;
  std::string message;
  OracleResult result;
  nlohmann::json record;
};

/// max_support < 0 searches every support size.
OracleOutcome run_oracle(const ScenarioSpec& spec, int max_support,
                         const RunOptions& options = {});

struct SweepPoint {
  double target_db = 0.0;
  RunStatus status = RunStatus::kOk;
  std::optional<int> n_corrections;
  std::optional<double> achieved_db;
};

struct FrontierPoint {
  int n_corrections = 0;
  double achieved_db = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<FrontierPoint> frontier;
};

/// Points not dominated in (fewer corrections, lower SLL), by increasing
/// correction count.
std::vector<FrontierPoint> pareto_frontier(std::span<const SweepPoint> points);

/// Targets must be sorted from loosest to tightest.
SweepResult tradeoff_sweep(const ScenarioSpec& spec, std::span<const double> targets_db,
                           const RunOptions& options = {});

/// Maps 1-based failure seeds of a base_n array onto an m*base_n array:
/// seed n_f yields m*n_f - j below the center and m*n_f + j above it,
/// j = 0..per_seed_count-1. Sorted, deduplicated.
std::vector<int> scale_failure_scenario(std::span<const int> base_faults, int base_n, int m,
                                        int per_seed_count);

struct SummaryRow {
  std::string name;
  RunStatus status = RunStatus::kOk;
  std::string message;
  int n_elements = 0;
  int n_failed = 0;
  int n_reconfigurable = 0;
  std::optional<double> sll_original, sll_faulty, sll_target, sll_corrected;
  std::optional<double> bw_original, bw_faulty, bw_target, bw_corrected;
  std::optional<int> n_corrections;
  double elapsed_seconds = 0.0;

  double eta_f() const;
  std::optional<double> eta_c() const;      // N_C / N
  std::optional<double> eta_c_hat() const;  // corrections / N_C
};

SummaryRow summarize(const ScenarioOutcome& outcome);

/// Runs every *.json file in directory (sorted by name) with up to
/// parallelism concurrent runs and writes summary.csv to out_dir.
std::vector<SummaryRow> batch_run(const std::filesystem::path& directory, int parallelism,
                                  const RunOptions& options = {});

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);

/// printf("%.6g") rounding applied to every number written to disk.
double round6(double v);
std::string format6(double v);

}  // namespace arrayfix
