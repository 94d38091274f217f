// arrayfix: command-line front end for the correction experiments.
//
//   arrayfix run <scenario.json>
//   arrayfix oracle <scenario.json> --max-support 3
//   arrayfix sweep <scenario.json> [--targets -22,-23,-24]
//   arrayfix scale --base 5,45 --n 50 --m 2 --count 2
//   arrayfix batch <dir> --parallel 4
//
// Exit status: 0 success, 2 infeasible target, 1 any other error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arrayfix/bench.hpp"
#include "arrayfix/errors.hpp"

using namespace arrayfix;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string opt(const std::optional<double>& v) { return v ? format6(*v) : "-"; }

int cmd_run(const std::string& path, const RunOptions& options) {
  const auto out = run_scenario(load_scenario(path), options);
  if (out.status != RunStatus::kOk) {
    std::cout << out.name << ": " << to_string(out.status) << ": " << out.message << "\n";
    return out.status == RunStatus::kInfeasible ? kExitInfeasible : kExitError;
  }
  const auto& r = *out.correction;
  std::cout << out.name << ": corrections " << r.n_corrections << "/" << out.n_reconfigurable
            << ", l1 " << format6(r.l1) << ", SLL " << format6(out.faulty->sll_db) << " -> "
            << format6(out.corrected->sll_db) << " dB (target " << format6(out.target_db)
            << "), BW " << opt(out.corrected->bw_deg) << " deg (target "
            << opt(out.bw_target_deg) << "), " << format6(out.elapsed_seconds) << " s\n";
  return kExitOk;
}

int cmd_oracle(const std::string& path, int max_support, const RunOptions& options) {
  const auto out = run_oracle(load_scenario(path), max_support, options);
  if (out.status == RunStatus::kError) {
    std::cout << out.name << ": error: " << out.message << "\n";
    return kExitError;
  }
  if (out.status == RunStatus::kInfeasible) {
    std::cout << out.name << ": " << out.message << " (" << out.result.solves << " solves)\n";
    return kExitInfeasible;
  }
  std::vector<int> support;
  for (auto n : out.result.support) support.push_back(static_cast<int>(n) + 1);
  std::cout << out.name << ": minimum corrections " << out.result.best->n_corrections
            << ", support {" << join(support) << "}, " << out.result.solves << " solves\n";
  return kExitOk;
}

int cmd_sweep(const std::string& path, std::vector<double> targets, const RunOptions& options) {
  const auto spec = load_scenario(path);
  if (targets.empty()) {
    if (!spec.sweep) throw InvalidArgument(spec.name + ": no sweep targets given");
    targets = spec.sweep->targets_db;
  }
  const auto res = tradeoff_sweep(spec, targets, options);
  for (const auto& p : res.points) {
    std::cout << format6(p.target_db) << " dB: " << to_string(p.status);
    if (p.n_corrections) {
      std::cout << ", " << *p.n_corrections << " corrections, " << format6(*p.achieved_db) << " dB";
    }
    std::cout << "\n";
  }
  std::cout << "frontier:";
  for (const auto& f : res.frontier) {
    std::cout << " (" << f.n_corrections << ", " << format6(f.achieved_db) << ")";
  }
  std::cout << "\n";
  return kExitOk;
}

int cmd_batch(const std::string& dir, int parallel, const RunOptions& options) {
  const auto rows = batch_run(dir, parallel, options);
  int code = kExitOk;
  for (const auto& r : rows) {
    std::cout << r.name << ": " << to_string(r.status);
    if (r.n_corrections) std::cout << ", " << *r.n_corrections << " corrections";
    if (!r.message.empty()) std::cout << ", " << r.message;
    std::cout << "\n";
    if (r.status == RunStatus::kError) code = kExitError;
    if (r.status == RunStatus::kInfeasible && code == kExitOk) code = kExitInfeasible;
  }
  std::cout << rows.size() << " scenarios, summary in "
            << (options.out_dir / "summary.csv").string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse excitation correction for linear arrays with failed elements"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions options;
  std::string out_dir = ".";
  std::optional<int> grid;
  std::optional<double> tol;
  int max_support = -1;
  int parallel = 1;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--grid", grid, "Sidelobe grid points over [-1, 1]")->check(CLI::Range(3, 10000000));
  app.add_option("--constraint-tol", tol, "Accepted metric slack in dB");
  app.add_option("--max-support", max_support, "Largest support examined by the oracle");
  app.add_option("--parallel", parallel, "Concurrent scenarios in batch mode")->check(CLI::PositiveNumber);

  std::string spec_path;
  auto* run = app.add_subcommand("run", "Correct one scenario");
  run->add_option("scenario", spec_path, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle", "Exhaustive minimum-support search");
  oracle->add_option("scenario", spec_path, "Scenario file")->required()->check(CLI::ExistingFile);

  std::vector<double> targets;
  auto* sweep = app.add_subcommand("sweep", "Correct one scenario for a list of targets");
  sweep->add_option("scenario", spec_path, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--targets", targets, "Targets in dB, loosest first")->delimiter(',');

  std::vector<int> base;
  int base_n = 0, factor = 1, count = 1;
  auto* scale = app.add_subcommand("scale", "Map failure seeds onto a larger array");
  scale->add_option("--base", base, "1-based seed indices")->required()->delimiter(',');
  scale->add_option("--n", base_n, "Base array size")->required();
  scale->add_option("--m", factor, "Size multiplier")->required();
  scale->add_option("--count", count, "Indices generated per seed")->required();

  std::string batch_dir;
  auto* batch = app.add_subcommand("batch", "Run every scenario in a directory");
  batch->add_option("directory", batch_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  options.out_dir = out_dir;
  options.grid_density = grid;
  options.constraint_tol_db = tol;

  try {
    if (*run) return cmd_run(spec_path, options);
    if (*oracle) return cmd_oracle(spec_path, max_support, options);
    if (*sweep) return cmd_sweep(spec_path, targets, options);
    if (*scale) {
      std::cout << join(scale_failure_scenario(base, base_n, factor, count)) << "\n";
      return kExitOk;
    }
    if (*batch) return cmd_batch(batch_dir, parallel, options);
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
