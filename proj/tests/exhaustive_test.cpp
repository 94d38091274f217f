#include "arrayfix/exhaustive.hpp"

#include <random>

#include <gtest/gtest.h>

#include "arrayfix/errors.hpp"
#include "arrayfix/taper.hpp"
#include "random_instance.hpp"

namespace arrayfix {
namespace {

struct Toy {
  ArrayGeometry geometry = uniform_positions(4);
  Excitations original = Excitations::from_real(std::vector{1.0, 0.419, 0.419, 1.0});
  FailureScenario scenario = FailureScenario({0, 1, 0, 0});
  MetricSpec metric{MetricKind::kMaxSidelobe, AngularRegion({-0.7, -0.5, 0.5, 0.7}), -5.5};
};

TEST(ExhaustiveMin, Toy) {
  Toy t;
  const auto r = exhaustive_min(t.geometry, t.original, t.scenario, t.metric, SolverConfig{});
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.best->n_corrections, 1);
  EXPECT_EQ(r.support, (std::vector<std::size_t>{2}));
  EXPECT_EQ(r.searched_up_to, 1);
  EXPECT_NEAR(std::abs(r.best->delta_opt[2]), 1.09, 0.03);
}

TEST(ExhaustiveMin, CompliantArrayNeedsNothing) {
  const auto g = uniform_positions(8);
  const auto w = dolph_chebyshev(8, -20.0);
  const auto region = sidelobe_region(40.0, 401);
  MetricSpec m{MetricKind::kMaxSidelobe, region, max_sll(g, w, region)};
  const auto r = exhaustive_min(g, w, FailureScenario::none(8), m, SolverConfig{});
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.best->n_corrections, 0);
  EXPECT_TRUE(r.support.empty());
  EXPECT_EQ(r.solves, 0);
}

TEST(ExhaustiveMin, InfeasibleUpToLimit) {
  Toy t;
  t.metric.target_db = -100.0;
  OracleOptions opts;
  opts.max_support = 2;
  const auto r = exhaustive_min(t.geometry, t.original, t.scenario, t.metric, SolverConfig{}, opts);
  EXPECT_FALSE(r.feasible());
  EXPECT_EQ(r.searched_up_to, 2);
  EXPECT_EQ(r.solves, 6);
}

TEST(ExhaustiveMin, Budget) {
  Toy t;
  t.metric.target_db = -100.0;
  OracleOptions opts;
  opts.max_solves = 2;
  EXPECT_THROW(exhaustive_min(t.geometry, t.original, t.scenario, t.metric, SolverConfig{}, opts),
               BudgetExceeded);
}

TEST(ExhaustiveMin, MaxSupportTooLarge) {
  Toy t;
  OracleOptions opts;
  opts.max_support = 4;
  EXPECT_THROW(exhaustive_min(t.geometry, t.original, t.scenario, t.metric, SolverConfig{}, opts),
               InvalidArgument);
}

TEST(ExhaustiveMin, TestCaseOneMatchesCp) {
  const auto g = uniform_positions(16);
  const auto w = dolph_chebyshev(16, -15.0);
  const std::size_t faulty[] = {1, 2, 8};
  const auto s = FailureScenario::from_indices(16, faulty);
  const double bw = beamwidth(uniform_positions(13), dolph_chebyshev(13, -15.0), -15.0,
                              AngularRegion::uniform_grid(kDefaultBeamGrid));
  MetricSpec m{MetricKind::kMaxSidelobe, sidelobe_region(bw, 2001), -15.0};
  OracleOptions opts;
  opts.max_support = 3;
  const auto r = exhaustive_min(g, w, s, m, SolverConfig{}, opts);
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.best->n_corrections, 3);
  EXPECT_EQ(cp_correct(g, w, s, m, SolverConfig{}).n_corrections, 3);
}

class OracleDominance : public ::testing::TestWithParam<int> {};

TEST_P(OracleDominance, OracleNeverNeedsMoreThanCp) {
  std::mt19937 rng(77 + GetParam());
  const auto inst = testing::random_instance(rng, 5, 9, 2);
  const auto& s = inst.scenario;
  SolverConfig cfg;

  CorrectionResult cp;
  try {
    cp = cp_correct(inst.geometry, inst.original, s, inst.metric, cfg);
  } catch (const Infeasible&) {
    GTEST_SKIP() << "random instance infeasible";
  }
  const auto oracle = exhaustive_min(inst.geometry, inst.original, s, inst.metric, cfg);
  ASSERT_TRUE(oracle.feasible());
  EXPECT_LE(oracle.best->n_corrections, cp.n_corrections);
  EXPECT_LE(oracle.best->achieved_phi_db, inst.metric.target_db + cfg.constraint_tol_db);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.is_faulty(i)) EXPECT_EQ(oracle.best->delta_opt[i], Complex(0.0, 0.0));
  }
}

INSTANTIATE_TEST_SUITE_P(Random, OracleDominance, ::testing::Range(0, 6));

}  // namespace
}  // namespace arrayfix
