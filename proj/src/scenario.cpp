#include "arrayfix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "arrayfix/errors.hpp"
#include "arrayfix/taper.hpp"

namespace arrayfix {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return it->get<T>();
}

Complex parse_weight(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw InvalidArgument("taper weights must be numbers or [re, im] pairs");
}

TaperSpec parse_taper(const json& t) {
  TaperSpec out;
  const auto kind = t.at("kind").get<std::string>();
  if (kind == "dolph_chebyshev") {
    out.kind = TaperSpec::Kind::kDolphChebyshev;
    out.sll_db = t.at("sll_db").get<double>();
  } else if (kind == "explicit") {
    out.kind = TaperSpec::Kind::kExplicit;
    for (const auto& v : t.at("weights")) out.weights.push_back(parse_weight(v));
  } else {
    throw InvalidArgument("unknown taper kind '" + kind + "'");
  }
  return out;
}

MetricConfig parse_metric(const json& m) {
  MetricConfig out;
  const auto kind = get_or<std::string>(m, "kind", "max_sidelobe");
  if (kind != "max_sidelobe") throw InvalidArgument("unknown metric kind '" + kind + "'");
  if (m.contains("target_db") && !m["target_db"].is_null()) out.target_db = m["target_db"].get<double>();
  if (m.contains("bw_target_deg") && !m["bw_target_deg"].is_null()) {
    out.bw_target_deg = m["bw_target_deg"].get<double>();
  }
  if (m.contains("region") && !m["region"].is_null()) {
    out.region = m["region"].get<std::vector<double>>();
  }
  out.grid_density = get_or(m, "grid_density", out.grid_density);
  return out;
}

CorrectionDomain parse_domain(const std::string& s) {
  if (s == "auto") return CorrectionDomain::kAutomatic;
  if (s == "real") return CorrectionDomain::kReal;
  if (s == "complex") return CorrectionDomain::kComplex;
  throw InvalidArgument("unknown correction domain '" + s + "'");
}

void apply_solver_overrides(const json& s, SolverConfig& cfg, int& cp_max_iterations) {
  static const std::set<std::string> known = {
      "max_iterations",  "min_step",       "optimality_tol",  "constraint_tol_db",
      "zero_threshold",  "barrier_initial", "barrier_growth", "broadside_floor",
      "max_linearizations", "domain",      "cp_max_iterations"};
  for (const auto& [key, _] : s.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown solver option '" + key + "'");
  }
  cfg.max_iterations = get_or(s, "max_iterations", cfg.max_iterations);
  cfg.min_step = get_or(s, "min_step", cfg.min_step);
  cfg.optimality_tol = get_or(s, "optimality_tol", cfg.optimality_tol);
  cfg.constraint_tol_db = get_or(s, "constraint_tol_db", cfg.constraint_tol_db);
  cfg.zero_threshold = get_or(s, "zero_threshold", cfg.zero_threshold);
  cfg.barrier_initial = get_or(s, "barrier_initial", cfg.barrier_initial);
  cfg.barrier_growth = get_or(s, "barrier_growth", cfg.barrier_growth);
  cfg.broadside_floor = get_or(s, "broadside_floor", cfg.broadside_floor);
  cfg.max_linearizations = get_or(s, "max_linearizations", cfg.max_linearizations);
  if (s.contains("domain")) cfg.domain = parse_domain(s["domain"].get<std::string>());
  cp_max_iterations = get_or(s, "cp_max_iterations", cp_max_iterations);
}

SweepConfig parse_sweep(const json& s) {
  SweepConfig out;
  if (s.contains("targets_db")) {
    out.targets_db = s["targets_db"].get<std::vector<double>>();
    return out;
  }
  const double from = s.at("from_db").get<double>();
  const double to = s.at("to_db").get<double>();
  const double step = std::abs(s.at("step_db").get<double>());
  if (!(step > 0.0)) throw InvalidArgument("sweep step must be positive");
  if (to > from) throw InvalidArgument("sweep runs from the loosest to the tightest target");
  const int count = static_cast<int>(std::floor((from - to) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    // Round to the step's resolution so the list prints cleanly.
    out.targets_db.push_back(std::round((from - i * step) * 1e6) / 1e6);
  }
  return out;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (name.empty()) throw InvalidArgument("scenario name is empty");
  if (n_elements < 2) throw InvalidArgument(name + ": n_elements must be >= 2");
  if (!(spacing_wavelengths > 0.0)) throw InvalidArgument(name + ": spacing must be positive");
  if (taper.kind == TaperSpec::Kind::kExplicit &&
      taper.weights.size() != static_cast<std::size_t>(n_elements)) {
    throw InvalidArgument(name + ": explicit weights must have n_elements entries");
  }
  std::set<int> seen;
  for (int idx : faulty_indices) {
    if (idx < 1 || idx > n_elements) {
      throw InvalidArgument(name + ": faulty index " + std::to_string(idx) + " out of range");
    }
    if (!seen.insert(idx).second) {
      throw InvalidArgument(name + ": duplicate faulty index " + std::to_string(idx));
    }
  }
  if (static_cast<int>(faulty_indices.size()) >= n_elements) {
    throw InvalidArgument(name + ": every element is faulty");
  }
  if (metric.grid_density < 3) throw InvalidArgument(name + ": grid_density must be >= 3");
  if (taper.kind == TaperSpec::Kind::kExplicit && !metric.region && !metric.bw_target_deg) {
    throw InvalidArgument(name + ": explicit tapers need bw_target_deg or region");
  }
  solver.validate();
  if (cp_max_iterations < 0) throw InvalidArgument(name + ": cp_max_iterations must be >= 0");
}

ScenarioSpec parse_scenario(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("scenario must be a JSON object");
  ScenarioSpec spec;
  try {
    spec.name = doc.at("name").get<std::string>();
    spec.n_elements = doc.at("n_elements").get<int>();
    spec.spacing_wavelengths = get_or(doc, "spacing_wavelengths", 0.5);
    spec.taper = parse_taper(doc.at("taper"));
    spec.faulty_indices = get_or(doc, "faulty_indices", std::vector<int>{});
    if (doc.contains("metric")) spec.metric = parse_metric(doc["metric"]);
    if (doc.contains("solver")) apply_solver_overrides(doc["solver"], spec.solver, spec.cp_max_iterations);
    if (doc.contains("sweep")) spec.sweep = parse_sweep(doc["sweep"]);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario: ") + e.what());
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  try {
    return parse_scenario(doc);
  } catch (const Error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

double dolph_chebyshev_beamwidth(int element_count, double sll_db) {
  return beamwidth(uniform_positions(element_count), dolph_chebyshev(element_count, sll_db),
                   sll_db, AngularRegion::uniform_grid(kDefaultBeamGrid));
}

Problem build_problem(const ScenarioSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n_elements);
  auto geometry = uniform_positions(spec.n_elements, spec.spacing_wavelengths);
  Excitations original = spec.taper.kind == TaperSpec::Kind::kDolphChebyshev
                             ? dolph_chebyshev(spec.n_elements, spec.taper.sll_db)
                             : Excitations(spec.taper.weights);
  std::vector<std::size_t> faulty;
  for (int idx : spec.faulty_indices) faulty.push_back(static_cast<std::size_t>(idx - 1));
  auto scenario = FailureScenario::from_indices(n, faulty);

  std::optional<double> bw_target = spec.metric.bw_target_deg;
  if (!bw_target && !spec.metric.region) {
    const int nc = static_cast<int>(scenario.reconfigurable_count());
    bw_target = dolph_chebyshev_beamwidth(nc, spec.taper.sll_db);
  }
  AngularRegion region = spec.metric.region ? AngularRegion(*spec.metric.region)
                                            : sidelobe_region(*bw_target, spec.metric.grid_density);

  double target;
  if (spec.metric.target_db) {
    target = *spec.metric.target_db;
  } else if (spec.taper.kind == TaperSpec::Kind::kDolphChebyshev) {
    target = spec.taper.sll_db;
  } else {
    target = max_sll(geometry, original, region);
  }
  MetricSpec metric{spec.metric.kind, std::move(region), target};
  metric.validate();
  return Problem{std::move(geometry), std::move(original), std::move(scenario), std::move(metric),
                 bw_target};
}

}  // namespace arrayfix
