#pragma once

// Small random correction problems for property tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "arrayfix/array_model.hpp"
#include "arrayfix/taper.hpp"

namespace arrayfix::testing {

struct RandomInstance {
  ArrayGeometry geometry;
  Excitations original;
  FailureScenario scenario;
  MetricSpec metric;
  double design_db;
};

// Dolph-Chebyshev array with 1..max_faults distinct failures. The target is
// drawn between the best level reached by a few reference tapers carrying
// the same failures and the faulty array's own level, so the reference
// proves feasibility while corrections are usually still needed.
inline RandomInstance random_instance(std::mt19937& rng, int min_n, int max_n, int max_faults,
                                      int grid = 401) {
  const int n = std::uniform_int_distribution<int>(min_n, max_n)(rng);
  const double design = std::uniform_real_distribution<double>(-25.0, -13.0)(rng);
  auto geometry = uniform_positions(n);
  auto original = dolph_chebyshev(n, design);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  const int nf = std::uniform_int_distribution<int>(1, max_faults)(rng);
  idx.resize(nf);
  auto scenario = FailureScenario::from_indices(n, idx);

  const int nc = n - nf;
  const double bw = nc >= 3 ? beamwidth(uniform_positions(nc), dolph_chebyshev(nc, design), design,
                                        AngularRegion::uniform_grid(kDefaultBeamGrid))
                            : 60.0;
  auto region = sidelobe_region(std::min(bw, 120.0), grid);

  auto level = [&](const Excitations& w) {
    try {
      return max_sll(geometry, apply_failures(w, scenario), region);
    } catch (const std::exception&) {
      return 0.0;
    }
  };
  const double faulty_sll = level(original);
  double reachable = faulty_sll;
  for (double extra : {5.0, 10.0, 15.0, 20.0}) {
    reachable = std::min(reachable, level(dolph_chebyshev(n, design - extra)));
  }
  const double frac = std::uniform_real_distribution<double>(0.1, 0.6)(rng);
  const double target = reachable + frac * (faulty_sll - reachable);
  MetricSpec metric{MetricKind::kMaxSidelobe, std::move(region), target};
  return {std::move(geometry), std::move(original), std::move(scenario), std::move(metric), design};
}

}  // namespace arrayfix::testing
