#include "arrayfix/l1_solver.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "arrayfix/errors.hpp"
#include "arrayfix/taper.hpp"
#include "random_instance.hpp"

namespace arrayfix {
namespace {

struct Toy {
  ArrayGeometry geometry = uniform_positions(4);
  Excitations faulty = Excitations::from_real(std::vector{1.0, 0.0, 0.419, 1.0});
  FailureScenario scenario = FailureScenario({0, 1, 0, 0});
  MetricSpec metric{MetricKind::kMaxSidelobe, AngularRegion({-0.7, -0.5, 0.5, 0.7}), -5.5};
};

TEST(Norms, L1) {
  EXPECT_DOUBLE_EQ(l1_norm(Excitations::from_real(std::vector{0.0, 0.0, 1.09, 0.0})), 1.09);
  EXPECT_NEAR(l1_norm(Excitations::from_real(std::vector{-0.438, 0.0, 0.593, -9.72e-6})), 1.031, 1e-3);
  EXPECT_EQ(l1_norm(Excitations::zeros(5)), 0.0);
  EXPECT_DOUBLE_EQ(l1_norm(Excitations({Complex(3.0, 4.0)})), 5.0);
}

TEST(Norms, L0) {
  const auto d = Excitations::from_real(std::vector{-0.438, 0.0, 0.593, -9.72e-6});
  EXPECT_EQ(l0_norm(d, 1e-12), 3);
  EXPECT_EQ(l0_norm(d, 1e-5), 2);
  EXPECT_EQ(l0_norm(Excitations::zeros(4), 1e-12), 0);
}

TEST(ZeroMask, Construction) {
  const auto m = ZeroMask::from_failures(FailureScenario({0, 1, 0, 0}));
  EXPECT_EQ(m.free_indices(), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(m.with_masked(3).free_count(), 2u);
  const std::size_t support[] = {2};
  const auto a = ZeroMask::allowing(4, support);
  EXPECT_EQ(a.free_indices(), (std::vector<std::size_t>{2}));
  EXPECT_THROW(ZeroMask({0, 3}), InvalidArgument);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.max_iterations = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.constraint_tol_db = 2.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.barrier_growth = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(SolveConstrainedL1, ToyInitialSolve) {
  Toy t;
  SolverConfig cfg;
  const auto d = solve_constrained_l1(t.metric, ZeroMask::from_failures(t.scenario),
                                      Excitations::zeros(4), cfg, t.geometry, t.faulty);
  EXPECT_NEAR(d[0].real(), -0.438, 0.02);
  EXPECT_EQ(d[1], Complex(0.0, 0.0));
  EXPECT_NEAR(d[2].real(), 0.593, 0.02);
  EXPECT_NEAR(std::abs(d[3]), 0.0, 0.02);
  EXPECT_NEAR(l1_norm(d), 1.03, 0.02);
  EXPECT_NEAR(evaluate_metric(t.geometry, t.faulty + d, t.metric), -5.5, 0.05);
}

TEST(SolveConstrainedL1, ToyRestrictedSupport) {
  Toy t;
  SolverConfig cfg;
  const auto start = Excitations::from_real(std::vector{0.0, 0.0, 0.593, 0.0});
  const auto mask = ZeroMask({1, 1, 0, 1});
  const auto d = solve_constrained_l1(t.metric, mask, start, cfg, t.geometry, t.faulty);
  EXPECT_NEAR(d[2].real(), 1.09, 0.02);
  EXPECT_EQ(d[0], Complex(0.0, 0.0));
  EXPECT_EQ(d[1], Complex(0.0, 0.0));
  EXPECT_EQ(d[3], Complex(0.0, 0.0));
  EXPECT_NEAR(evaluate_metric(t.geometry, t.faulty + d, t.metric), -5.5, 0.05);
}

TEST(SolveConstrainedL1, AlreadyCompliantReturnsZero) {
  Toy t;
  t.metric.target_db = 0.0;
  const auto rep = solve_constrained_l1_report(t.metric, ZeroMask::from_failures(t.scenario),
                                               Excitations::zeros(4), SolverConfig{}, t.geometry,
                                               t.faulty);
  EXPECT_EQ(rep.status, SolveStatus::kStartFeasible);
  EXPECT_EQ(rep.delta, Excitations::zeros(4));
}

TEST(SolveConstrainedL1, UnreachableTarget) {
  Toy t;
  t.metric.target_db = -100.0;
  EXPECT_THROW(solve_constrained_l1(t.metric, ZeroMask::from_failures(t.scenario),
                                    Excitations::zeros(4), SolverConfig{}, t.geometry, t.faulty),
               Infeasible);
}

TEST(SolveConstrainedL1, InputErrors) {
  Toy t;
  SolverConfig cfg;
  EXPECT_THROW(solve_constrained_l1(t.metric, ZeroMask({1, 1, 1, 1}), Excitations::zeros(4), cfg,
                                    t.geometry, t.faulty),
               InvalidArgument);
  const auto bad_start = Excitations::from_real(std::vector{0.0, 0.5, 0.0, 0.0});
  EXPECT_THROW(solve_constrained_l1(t.metric, ZeroMask::from_failures(t.scenario), bad_start, cfg,
                                    t.geometry, t.faulty),
               ConstraintViolation);
  EXPECT_THROW(solve_constrained_l1(t.metric, ZeroMask({0, 1, 0}), Excitations::zeros(4), cfg,
                                    t.geometry, t.faulty),
               InvalidArgument);
}

TEST(SolveConstrainedL1, ComplexDomainMatchesRealOnToy) {
  Toy t;
  SolverConfig cfg;
  cfg.domain = CorrectionDomain::kComplex;
  const auto d = solve_constrained_l1(t.metric, ZeroMask::from_failures(t.scenario),
                                      Excitations::zeros(4), cfg, t.geometry, t.faulty);
  EXPECT_NEAR(l1_norm(d), 1.03, 0.02);
  EXPECT_LE(evaluate_metric(t.geometry, t.faulty + d, t.metric), -5.5 + cfg.constraint_tol_db);
}

TEST(SolveConstrainedL1, ComplexFaultyWeights) {
  const auto g = uniform_positions(8);
  auto w = dolph_chebyshev(8, -20.0);
  for (std::size_t n = 0; n < 8; ++n) w.set(n, w[n] * std::polar(1.0, 0.05 * (n % 3)));
  const auto s = FailureScenario({0, 0, 1, 0, 0, 0, 0, 0});
  const auto faulty = apply_failures(w, s);
  const auto region = sidelobe_region(40.0, 401);
  auto ref = dolph_chebyshev(8, -35.0);
  for (std::size_t n = 0; n < 8; ++n) ref.set(n, ref[n] * std::polar(1.0, 0.05 * (n % 3)));
  const double target =
      0.5 * (max_sll(g, apply_failures(ref, s), region) + max_sll(g, faulty, region));
  MetricSpec m{MetricKind::kMaxSidelobe, region, target};
  SolverConfig cfg;
  const auto d = solve_constrained_l1(m, ZeroMask::from_failures(s), Excitations::zeros(8), cfg, g,
                                      faulty);
  EXPECT_EQ(d[2], Complex(0.0, 0.0));
  EXPECT_FALSE(d.is_real());
  EXPECT_LE(evaluate_metric(g, faulty + d, m), target + cfg.constraint_tol_db);
}

// Properties over random small instances.
class SolverProperties : public ::testing::TestWithParam<int> {};

TEST_P(SolverProperties, MaskFeasibilityDeterminism) {
  std::mt19937 rng(1000 + GetParam());
  const auto inst = testing::random_instance(rng, 6, 12, 3);
  const auto& g = inst.geometry;
  const auto& s = inst.scenario;
  const auto faulty = apply_failures(inst.original, s);
  const auto mask = ZeroMask::from_failures(s);
  const auto n = g.size();
  SolverConfig cfg;

  Excitations d;
  try {
    d = solve_constrained_l1(inst.metric, mask, Excitations::zeros(n), cfg, g, faulty);
  } catch (const Infeasible&) {
    GTEST_SKIP() << "random instance infeasible";
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (s.is_faulty(i)) EXPECT_EQ(d[i], Complex(0.0, 0.0));
  }
  EXPECT_LE(max_sll(g, faulty + d, inst.metric.region), inst.metric.target_db + cfg.constraint_tol_db);
  EXPECT_EQ(solve_constrained_l1(inst.metric, mask, Excitations::zeros(n), cfg, g, faulty), d);
  // A feasible warm start never ends at a costlier correction.
  const auto warm = solve_constrained_l1(inst.metric, mask, d, cfg, g, faulty);
  EXPECT_LE(l1_norm(warm), l1_norm(d) * (1.0 + 1e-4) + 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Random, SolverProperties, ::testing::Range(0, 12));

TEST(MeetsTarget, DegenerateBroadsideIsFailure) {
  const auto g = uniform_positions(2);
  const auto faulty = Excitations::from_real(std::vector{1.0, 0.0});
  const auto delta = Excitations::from_real(std::vector{-1.0, 0.0});
  MetricSpec m{MetricKind::kMaxSidelobe, AngularRegion({0.5}), 0.0};
  EXPECT_FALSE(meets_target(g, faulty, delta, m, 0.02));
  EXPECT_TRUE(meets_target(g, faulty, Excitations::zeros(2), m, 0.02));
}

}  // namespace
}  // namespace arrayfix
