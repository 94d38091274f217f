#include "arrayfix/taper.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "arrayfix/errors.hpp"

namespace arrayfix {
namespace {

// Max sidelobe of a broadside pattern, searched past the first null on a
// dense grid.
double measured_sll(const Excitations& w) {
  const auto g = uniform_positions(static_cast<int>(w.size()));
  const auto grid = AngularRegion::uniform_grid(200001);
  const auto u = grid.samples();
  const auto p = pattern_db(g, w, u);
  std::size_t i = u.size() / 2;
  while (i + 1 < u.size() && p[i + 1] < p[i]) ++i;
  double worst = kDbFloor;
  for (; i < u.size(); ++i) worst = std::max(worst, p[i]);
  return worst;
}

TEST(DolphChebyshev, SixteenElementsFifteenDb) {
  const auto w = dolph_chebyshev(16, -15.0);
  EXPECT_NEAR(measured_sll(w), -15.0, 0.05);
  EXPECT_NEAR(beamwidth(uniform_positions(16), w, -15.0, AngularRegion::uniform_grid(kDefaultBeamGrid)),
              11.70, 0.05);
}

TEST(DolphChebyshev, FiftyElementsDynamicRange) {
  EXPECT_NEAR(dynamic_range(dolph_chebyshev(50, -25.0)), 3.86, 0.05);
}

class DolphChebyshevSelfConsistency : public ::testing::TestWithParam<std::pair<int, double>> {};

TEST_P(DolphChebyshevSelfConsistency, MeasuredSllMatchesDesign) {
  const auto [n, sll] = GetParam();
  EXPECT_NEAR(measured_sll(dolph_chebyshev(n, sll)), sll, 0.05);
}

INSTANTIATE_TEST_SUITE_P(Sizes, DolphChebyshevSelfConsistency,
                         ::testing::Values(std::pair{3, -20.0}, std::pair{8, -25.0},
                                           std::pair{13, -15.0}, std::pair{25, -25.0},
                                           std::pair{50, -30.0}, std::pair{100, -25.0}));

TEST(DolphChebyshev, SymmetricPositiveNormalized) {
  for (int n : {3, 4, 7, 16, 33}) {
    const auto w = dolph_chebyshev(n, -22.0);
    ASSERT_EQ(w.size(), static_cast<std::size_t>(n));
    EXPECT_TRUE(w.is_real());
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(w[i], w[n - 1 - i]);
      EXPECT_GT(w[i].real(), 0.0);
      peak = std::max(peak, w[i].real());
    }
    EXPECT_DOUBLE_EQ(peak, 1.0);
  }
}

TEST(DolphChebyshev, RejectsBadInput) {
  EXPECT_THROW(dolph_chebyshev(2, -20.0), InvalidArgument);
  EXPECT_THROW(dolph_chebyshev(8, 0.0), InvalidArgument);
  EXPECT_THROW(dolph_chebyshev(8, 3.0), InvalidArgument);
}

TEST(ApplyFailures, SevenElementExample) {
  const auto w = Excitations::from_real(std::vector{1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0});
  const auto s = FailureScenario({0, 0, 1, 0, 0, 0, 0});
  EXPECT_EQ(apply_failures(w, s), Excitations::from_real(std::vector{1.0, 2.0, 0.0, 4.0, 3.0, 2.0, 1.0}));
}

TEST(ApplyFailures, NoneAndAll) {
  const auto w = dolph_chebyshev(5, -20.0);
  EXPECT_EQ(apply_failures(w, FailureScenario::none(5)), w);
  EXPECT_EQ(apply_failures(w, FailureScenario({1, 1, 1, 1, 1})), Excitations::zeros(5));
  EXPECT_THROW(apply_failures(w, FailureScenario::none(4)), InvalidArgument);
}

TEST(ApplyFailures, Idempotent) {
  const auto w = dolph_chebyshev(12, -25.0);
  const auto s = FailureScenario({1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0});
  const auto once = apply_failures(w, s);
  EXPECT_EQ(apply_failures(once, s), once);
}

TEST(CorrectedWeights, ToyFinal) {
  const auto faulty = Excitations::from_real(std::vector{1.0, 0.0, 0.419, 1.0});
  const auto delta = Excitations::from_real(std::vector{0.0, 0.0, 1.09, 0.0});
  const auto s = FailureScenario({0, 1, 0, 0});
  const auto w = corrected_weights(faulty, delta, s);
  EXPECT_NEAR(w[2].real(), 1.509, 1e-12);
  EXPECT_EQ(corrected_weights(faulty, Excitations::zeros(4), s), faulty);
}

TEST(CorrectedWeights, RejectsCorrectionOnFailedElement) {
  const auto faulty = Excitations::from_real(std::vector{1.0, 0.0, 0.419, 1.0});
  const auto delta = Excitations::from_real(std::vector{0.0, 0.2, 0.0, 0.0});
  EXPECT_THROW(corrected_weights(faulty, delta, FailureScenario({0, 1, 0, 0})), ConstraintViolation);
}

TEST(CorrectedWeights, RestoresOriginalOnWorkingElements) {
  const auto w = dolph_chebyshev(9, -20.0);
  const auto s = FailureScenario({0, 1, 0, 0, 1, 0, 0, 0, 0});
  const auto faulty = apply_failures(w, s);
  auto delta = w - faulty;
  for (std::size_t n = 0; n < 9; ++n) {
    if (s.is_faulty(n)) delta.set(n, 0.0);
  }
  const auto restored = corrected_weights(faulty, delta, s);
  for (std::size_t n = 0; n < 9; ++n) {
    if (!s.is_faulty(n)) EXPECT_EQ(restored[n], w[n]);
  }
}

}  // namespace
}  // namespace arrayfix
