#include "arrayfix/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "arrayfix/errors.hpp"
#include "arrayfix/taper.hpp"

namespace arrayfix {

using nlohmann::json;

double round6(double v) {
  if (!std::isfinite(v)) return v;
  const double r = std::stod(format6(v));
  return r == 0.0 ? 0.0 : r;
}

std::string format6(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kOk:
      return "ok";
    case RunStatus::kInfeasible:
      return "infeasible";
    case RunStatus::kError:
      return "error";
  }
  return "unknown";
}

ScenarioSpec with_overrides(const ScenarioSpec& spec, const RunOptions& options) {
  ScenarioSpec out = spec;
  if (options.grid_density) out.metric.grid_density = *options.grid_density;
  if (options.constraint_tol_db) out.solver.constraint_tol_db = *options.constraint_tol_db;
  out.validate();
  return out;
}

namespace {

const AngularRegion& pattern_grid() {
  static const AngularRegion grid = AngularRegion::uniform_grid(kPatternGrid);
  return grid;
}

template <typename F>
std::optional<double> optional_figure(F&& f) {
  try {
    return f();
  } catch (const NoMainlobe&) {
  } catch (const DegenerateBroadside&) {
  }
  return std::nullopt;
}

json opt6(const std::optional<double>& v) { return v ? json(round6(*v)) : json(nullptr); }

json figures_json(const ArrayFigures& f) {
  return json{{"sll_db", round6(f.sll_db)},
              {"bw_deg", opt6(f.bw_deg)},
              {"hpbw_deg", opt6(f.hpbw_deg)},
              {"dynamic_range", round6(f.dynamic_range)}};
}

json weights_json(const Excitations& w) {
  json out = json::array();
  for (const auto& c : w.weights()) out.push_back({round6(c.real()), round6(c.imag())});
  return out;
}

json one_based(std::span<const std::uint8_t> flags) {
  json out = json::array();
  for (std::size_t n = 0; n < flags.size(); ++n) {
    if (flags[n]) out.push_back(n + 1);
  }
  return out;
}

json support_json(const Excitations& delta, double thr) {
  json out = json::array();
  for (std::size_t n = 0; n < delta.size(); ++n) {
    if (std::abs(delta[n]) > thr) out.push_back(n + 1);
  }
  return out;
}

std::string bits(std::span<const std::uint8_t> flags) {
  std::string s;
  for (auto f : flags) s.push_back(f ? '1' : '0');
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c == '\n' ? ' ' : c);
  }
  out.push_back('"');
  return out;
}

std::string csv_opt(const std::optional<double>& v) { return v ? format6(*v) : ""; }

std::string pattern_csv(const Problem& p, const Excitations& faulty,
                        const std::optional<Excitations>& corrected) {
  const auto u = pattern_grid().samples();
  const auto orig_db = pattern_db(p.geometry, p.original, u);
  std::vector<double> faulty_db, corr_db;
  try {
    faulty_db = pattern_db(p.geometry, faulty, u);
  } catch (const DegenerateBroadside&) {
  }
  if (corrected) corr_db = pattern_db(p.geometry, *corrected, u);
  std::string out = "u,original_db,faulty_db,corrected_db\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    out += format6(u[i]) + "," + format6(orig_db[i]) + ",";
    if (!faulty_db.empty()) out += format6(faulty_db[i]);
    out += ",";
    if (!corr_db.empty()) out += format6(corr_db[i]);
    out += "\n";
  }
  return out;
}

std::string trace_csv(const CorrectionResult& r) {
  std::string out = "k,step,event,n_least,resolved,l0,l1,phi_db,required,non_required\n";
  for (const auto& e : r.trace) {
    out += std::to_string(e.k) + "," + std::to_string(e.step) + "," + to_string(e.event) + ",";
    if (e.n_least) out += std::to_string(*e.n_least + 1);
    out += std::string(",") + (e.resolved ? "1" : "0") + ",";
    if (e.l0) out += std::to_string(*e.l0);
    out += "," + csv_opt(e.l1) + "," + csv_opt(e.phi_db) + ",";
    out += bits(e.required) + "," + bits(e.non_required) + "\n";
  }
  return out;
}

double pattern_check(const Problem& p, const Excitations& corrected) {
  const auto u = pattern_grid().samples();
  const auto db = pattern_db(p.geometry, corrected, u);
  double worst = kDbFloor;
  if (p.bw_target_deg) {
    const double edge = std::sin(*p.bw_target_deg / 2.0 * kPi / 180.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (std::abs(u[i]) >= edge) worst = std::max(worst, db[i]);
    }
  } else {
    const double step = 2.0 / (u.size() - 1);
    for (double s : p.metric.region.samples()) {
      const auto i = static_cast<std::size_t>(std::lround((s + 1.0) / step));
      worst = std::max(worst, db[std::min(i, u.size() - 1)]);
    }
  }
  return worst;
}

json base_record(const ScenarioSpec& spec, const Problem& p) {
  json rec;
  rec["name"] = spec.name;
  rec["n_elements"] = spec.n_elements;
  rec["spacing_wavelengths"] = round6(spec.spacing_wavelengths);
  std::vector<int> faults = spec.faulty_indices;
  std::sort(faults.begin(), faults.end());
  rec["faulty_indices"] = faults;
  rec["n_failed"] = p.scenario.failed_count();
  rec["n_reconfigurable"] = p.scenario.reconfigurable_count();
  rec["target_db"] = round6(p.metric.target_db);
  rec["bw_target_deg"] = opt6(p.bw_target_deg);
  rec["region_samples"] = p.metric.region.size();
  return rec;
}

}  // namespace

ArrayFigures measure(const Problem& problem, const Excitations& weights) {
  ArrayFigures f;
  f.sll_db = max_sll(problem.geometry, weights, problem.metric.region);
  f.bw_deg = optional_figure([&] {
    return beamwidth(problem.geometry, weights, problem.metric.target_db, pattern_grid());
  });
  f.hpbw_deg = optional_figure([&] { return hpbw(problem.geometry, weights, pattern_grid()); });
  f.dynamic_range = dynamic_range(weights);
  return f;
}

ScenarioOutcome run_scenario(const ScenarioSpec& raw_spec, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const ScenarioSpec spec = with_overrides(raw_spec, options);
  const Problem p = build_problem(spec);
  const Excitations faulty = apply_failures(p.original, p.scenario);

  ScenarioOutcome out;
  out.name = spec.name;
  out.n_elements = spec.n_elements;
  out.n_failed = static_cast<int>(p.scenario.failed_count());
  out.n_reconfigurable = static_cast<int>(p.scenario.reconfigurable_count());
  out.target_db = p.metric.target_db;
  out.bw_target_deg = p.bw_target_deg;
  out.original = measure(p, p.original);
  try {
    out.faulty = measure(p, faulty);
  } catch (const DegenerateBroadside&) {
  }

  json rec = base_record(spec, p);
  rec["original"] = figures_json(*out.original);
  rec["faulty"] = out.faulty ? figures_json(*out.faulty) : json(nullptr);

  std::optional<Excitations> corrected;
  try {
    CpOptions cp;
    cp.max_iterations = spec.cp_max_iterations;
    auto result = cp_correct(p.geometry, p.original, p.scenario, p.metric, spec.solver, cp);
    corrected = faulty + result.delta_opt;
    out.corrected = measure(p, *corrected);
    out.pattern_check_db = pattern_check(p, *corrected);

    const double thr = spec.solver.zero_threshold;
    rec["status"] = "ok";
    rec["corrected"] = figures_json(*out.corrected);
    rec["n_corrections"] = result.n_corrections;
    rec["eta_c_hat"] = round6(static_cast<double>(result.n_corrections) / out.n_reconfigurable);
    rec["l1_norm"] = round6(result.l1);
    rec["achieved_phi_db"] = round6(result.achieved_phi_db);
    rec["pattern_check_db"] = round6(*out.pattern_check_db);
    rec["k_opt"] = result.k_opt;
    rec["solver_calls"] = result.solver_calls;
    rec["iteration_cap_hit"] = result.iteration_cap_hit;
    rec["corrected_indices"] = support_json(result.delta_opt, thr);
    rec["required"] = one_based(result.required);
    rec["non_required"] = one_based(result.non_required);
    rec["delta"] = weights_json(result.delta_opt);
    rec["corrected_weights"] = weights_json(*corrected);
    out.correction = std::move(result);
  } catch (const Infeasible& e) {
    out.status = RunStatus::kInfeasible;
    out.message = e.what();
    rec["status"] = "infeasible";
    rec["message"] = out.message;
  }
  out.record = std::move(rec);

  if (options.write_files) {
    const auto& dir = options.out_dir;
    write_json(dir / (spec.name + ".result.json"), out.record);
    write_text(dir / (spec.name + ".pattern.csv"), pattern_csv(p, faulty, corrected));
    if (out.correction) write_text(dir / (spec.name + ".trace.csv"), trace_csv(*out.correction));
  }
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

OracleOutcome run_oracle(const ScenarioSpec& raw_spec, int max_support,
                         const RunOptions& options) {
  const ScenarioSpec spec = with_overrides(raw_spec, options);
  const Problem p = build_problem(spec);
  OracleOptions oo;
  oo.max_support = max_support;

  OracleOutcome out;
  out.name = spec.name;
  json rec = base_record(spec, p);
  rec["max_support"] = max_support;
  try {
    out.result = exhaustive_min(p.geometry, p.original, p.scenario, p.metric, spec.solver, oo);
    rec["searched_up_to"] = out.result.searched_up_to;
    rec["solves"] = out.result.solves;
    if (out.result.feasible()) {
      const auto& best = *out.result.best;
      rec["status"] = "ok";
      rec["n_corrections"] = best.n_corrections;
      json support = json::array();
      for (auto n : out.result.support) support.push_back(n + 1);
      rec["support"] = support;
      rec["l1_norm"] = round6(best.l1);
      rec["achieved_phi_db"] = round6(best.achieved_phi_db);
      rec["delta"] = weights_json(best.delta_opt);
    } else {
      out.status = RunStatus::kInfeasible;
      out.message = "no feasible support up to size " + std::to_string(out.result.searched_up_to);
      rec["status"] = "infeasible";
      rec["message"] = out.message;
    }
  } catch (const BudgetExceeded& e) {
    out.status = RunStatus::kError;
    out.message = e.what();
    rec["status"] = "error";
    rec["message"] = out.message;
  }
  out.record = std::move(rec);
  if (options.write_files) write_json(options.out_dir / (spec.name + ".oracle.json"), out.record);
  return out;
}

std::vector<FrontierPoint> pareto_frontier(std::span<const SweepPoint> points) {
  std::vector<FrontierPoint> ok;
  for (const auto& p : points) {
    if (p.status == RunStatus::kOk && p.n_corrections && p.achieved_db) {
      ok.push_back({*p.n_corrections, *p.achieved_db});
    }
  }
  std::sort(ok.begin(), ok.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    return a.n_corrections != b.n_corrections ? a.n_corrections < b.n_corrections
                                              : a.achieved_db < b.achieved_db;
  });
  std::vector<FrontierPoint> out;
  for (const auto& p : ok) {
    if (out.empty() || p.achieved_db < out.back().achieved_db) {
      if (!out.empty() && out.back().n_corrections == p.n_corrections) continue;
      out.push_back(p);
    }
  }
  return out;
}

SweepResult tradeoff_sweep(const ScenarioSpec& raw_spec, std::span<const double> targets_db,
                           const RunOptions& options) {
  if (targets_db.empty()) throw InvalidArgument("tradeoff_sweep: no targets");
  for (std::size_t i = 1; i < targets_db.size(); ++i) {
    if (targets_db[i] > targets_db[i - 1]) {
      throw InvalidArgument("tradeoff_sweep: targets must run from loosest to tightest");
    }
  }
  const ScenarioSpec spec = with_overrides(raw_spec, options);
  Problem p = build_problem(spec);
  CpOptions cp;
  cp.max_iterations = spec.cp_max_iterations;

  SweepResult out;
  for (double target : targets_db) {
    p.metric.target_db = target;
    SweepPoint pt;
    pt.target_db = target;
    try {
      auto r = cp_correct(p.geometry, p.original, p.scenario, p.metric, spec.solver, cp);
      pt.n_corrections = r.n_corrections;
      pt.achieved_db = r.achieved_phi_db;
    } catch (const Infeasible&) {
      pt.status = RunStatus::kInfeasible;
    }
    out.points.push_back(pt);
  }
  out.frontier = pareto_frontier(out.points);

  if (options.write_files) {
    std::string sweep = "target_db,status,n_corrections,achieved_db\n";
    for (const auto& pt : out.points) {
      sweep += format6(pt.target_db) + "," + to_string(pt.status) + ",";
      if (pt.n_corrections) sweep += std::to_string(*pt.n_corrections);
      sweep += "," + csv_opt(pt.achieved_db) + "\n";
    }
    std::string frontier = "n_corrections,achieved_db\n";
    for (const auto& f : out.frontier) {
      frontier += std::to_string(f.n_corrections) + "," + format6(f.achieved_db) + "\n";
    }
    write_text(options.out_dir / (spec.name + ".sweep.csv"), sweep);
    write_text(options.out_dir / (spec.name + ".frontier.csv"), frontier);
  }
  return out;
}

std::vector<int> scale_failure_scenario(std::span<const int> base_faults, int base_n, int m,
                                        int per_seed_count) {
  if (base_n < 2) throw InvalidArgument("scale_failure_scenario: base array too small");
  if (m < 1) throw InvalidArgument("scale_failure_scenario: M must be >= 1");
  if (per_seed_count < 1) throw InvalidArgument("scale_failure_scenario: count must be >= 1");
  const int size = m * base_n;
  std::vector<int> out;
  for (int nf : base_faults) {
    if (nf < 1 || nf > base_n) throw InvalidArgument("scale_failure_scenario: seed out of range");
    if (2 * nf == base_n) throw InvalidArgument("scale_failure_scenario: seed at the array center");
    const bool lower = 2 * nf < base_n;
    for (int j = 0; j < per_seed_count; ++j) {
      const int idx = lower ? m * nf - j : m * nf + j;
      if (idx < 1 || idx > size) {
        throw InvalidArgument("scale_failure_scenario: index " + std::to_string(idx) +
                              " outside 1.." + std::to_string(size));
      }
      out.push_back(idx);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double SummaryRow::eta_f() const {
  return n_elements > 0 ? static_cast<double>(n_failed) / n_elements : 0.0;
}

std::optional<double> SummaryRow::eta_c() const {
  if (n_elements <= 0) return std::nullopt;
  return static_cast<double>(n_reconfigurable) / n_elements;
}

std::optional<double> SummaryRow::eta_c_hat() const {
  if (!n_corrections || n_reconfigurable <= 0) return std::nullopt;
  return static_cast<double>(*n_corrections) / n_reconfigurable;
}

SummaryRow summarize(const ScenarioOutcome& o) {
  SummaryRow row;
  row.name = o.name;
  row.status = o.status;
  row.message = o.message;
  row.n_elements = o.n_elements;
  row.n_failed = o.n_failed;
  row.n_reconfigurable = o.n_reconfigurable;
  row.sll_target = o.target_db;
  row.bw_target = o.bw_target_deg;
  if (o.original) {
    row.sll_original = o.original->sll_db;
    row.bw_original = o.original->bw_deg;
  }
  if (o.faulty) {
    row.sll_faulty = o.faulty->sll_db;
    row.bw_faulty = o.faulty->bw_deg;
  }
  if (o.corrected) {
    row.sll_corrected = o.corrected->sll_db;
    row.bw_corrected = o.corrected->bw_deg;
  }
  if (o.correction) row.n_corrections = o.correction->n_corrections;
  row.elapsed_seconds = o.elapsed_seconds;
  return row;
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  std::string out =
      "name,status,n_elements,n_failed,eta_f_pct,sll_original,sll_faulty,sll_target,"
      "sll_corrected,bw_original,bw_faulty,bw_target,bw_corrected,n_corrections,eta_c_pct,"
      "eta_c_hat_pct,elapsed_s,message\n";
  auto pct = [](const std::optional<double>& v) {
    return v ? std::optional<double>(100.0 * *v) : std::nullopt;
  };
  for (const auto& r : rows) {
    out += csv_field(r.name) + "," + to_string(r.status) + ",";
    if (r.n_elements > 0) {
      out += std::to_string(r.n_elements) + "," + std::to_string(r.n_failed) + "," +
             format6(100.0 * r.eta_f());
    } else {
      out += ",,";
    }
    out += "," + csv_opt(r.sll_original) + "," + csv_opt(r.sll_faulty) + "," +
           csv_opt(r.sll_target) + "," + csv_opt(r.sll_corrected) + "," +
           csv_opt(r.bw_original) + "," + csv_opt(r.bw_faulty) + "," + csv_opt(r.bw_target) +
           "," + csv_opt(r.bw_corrected) + ",";
    if (r.n_corrections) out += std::to_string(*r.n_corrections);
    out += "," + csv_opt(pct(r.eta_c())) + "," + csv_opt(pct(r.eta_c_hat())) + "," +
           format6(r.elapsed_seconds) + "," + csv_field(r.message) + "\n";
  }
  write_text(path, out);
}

std::vector<SummaryRow> batch_run(const std::filesystem::path& directory, int parallelism,
                                  const RunOptions& options) {
  if (parallelism < 1) throw InvalidArgument("batch_run: parallelism must be >= 1");
  if (!std::filesystem::is_directory(directory)) {
    throw InvalidArgument("batch_run: " + directory.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<SummaryRow> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const auto started = std::chrono::steady_clock::now();
      try {
        rows[i] = summarize(run_scenario(load_scenario(files[i]), options));
      } catch (const std::exception& e) {
        SummaryRow err;
        err.name = files[i].stem().string();
        err.status = RunStatus::kError;
        err.message = e.what();
        err.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        rows[i] = std::move(err);
      }
    }
  };
  const int n_threads = std::min<int>(parallelism, std::max<std::size_t>(files.size(), 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (options.write_files) write_summary_csv(options.out_dir / "summary.csv", rows);
  return rows;
}

}  // namespace arrayfix
