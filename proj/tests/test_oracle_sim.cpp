#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "scenbound/bounding.hpp"
#include "scenbound/oracle_sim.hpp"

using namespace scenbound;
using namespace scenbound::oracle;

namespace {

std::vector<double> one_to(int n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

// Exhaustive displacement scan, independent of true_epsilon.
std::pair<std::size_t, std::size_t> displacement(const CoupledUniverse& u) {
  std::size_t up = 0, down = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.match[i] > i) up = std::max(up, u.match[i] - i);
    if (u.match[i] < i) down = std::max(down, i - u.match[i]);
  }
  return {down, up};
}

}  // namespace

TEST(Comonotonic, IdentityTransformsHaveZeroViolation) {
  const auto u = generate_comonotonic(one_to(4), Affine{}, Affine{});
  EXPECT_TRUE(u.equal_rank_matching());
  EXPECT_EQ(true_epsilon(u), ViolationParams::zero());
  EXPECT_EQ(true_epsilon(u).upper, 0.0);
}

TEST(Comonotonic, ConstantShiftGivesConstantDifference) {
  const auto u = generate_comonotonic(one_to(50), Affine{1, 0}, Affine{1, 5});
  for (const double z : true_z(u)) EXPECT_EQ(z, -5.0);
}

TEST(Comonotonic, DoubledLatentDifferenceEnumerates) {
  // x = w, y = 2w on w = 1..n: z_i = -w_i.
  const auto u = generate_comonotonic(one_to(100), Affine{1, 0}, Affine{2, 0});
  const auto z = true_z(u);
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(z[i], -static_cast<double>(i + 1));
}

TEST(Comonotonic, SeededGenerationIsReproducible) {
  const auto a = generate_comonotonic(1000, GaussianLaw{0, 1}, UniformLaw{0, 1}, 9);
  const auto b = generate_comonotonic(1000, GaussianLaw{0, 1}, UniformLaw{0, 1}, 9);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_TRUE(std::is_sorted(a.x.begin(), a.x.end()));
  EXPECT_TRUE(std::is_sorted(a.y.begin(), a.y.end()));
}

TEST(Transforms, RejectInvalidParameters) {
  EXPECT_THROW(check_transform(GaussianLaw{0, 0}), Error);
  EXPECT_THROW(check_transform(UniformLaw{2, 1}), Error);
  EXPECT_THROW(check_transform(Affine{-1, 0}), Error);
  EXPECT_THROW(check_transform(PiecewiseLinear{{0, 1}, {1, 0}}), Error);
  EXPECT_NEAR(apply(GaussianLaw{10, 2}, 0.5), 10.0, 1e-12);
  EXPECT_NEAR(apply(GaussianLaw{0, 1}, 0.975), 1.959963984540054, 1e-9);
  EXPECT_NEAR(apply(PiecewiseLinear{{0, 1}, {0, 10}}, 0.25), 2.5, 1e-12);
}

TEST(SwapRanks, ThirdAndSeventhOfTen) {
  const auto base = generate_comonotonic(one_to(10), Affine{}, Affine{});
  const auto u = swap_ranks(base, 2, 6);
  const auto eps = true_epsilon(u);
  EXPECT_DOUBLE_EQ(eps.upper, 0.4);
  EXPECT_DOUBLE_EQ(eps.lower, 0.4);
  EXPECT_TRUE(u.is_bijection());
  EXPECT_THROW(swap_ranks(base, 0, 10), Error);
}

TEST(InjectViolation, WindowAttainedExactly) {
  const auto base = generate_comonotonic(10000, GaussianLaw{1000, 100}, GaussianLaw{1000, 100}, 3);
  const auto u = inject_violation(base, 700, 4);
  ASSERT_TRUE(u.is_bijection());
  const auto [down, up] = displacement(u);
  EXPECT_EQ(up, 700u);
  EXPECT_EQ(down, 700u);
  EXPECT_DOUBLE_EQ(true_epsilon(u).upper, 0.07);
  EXPECT_DOUBLE_EQ(true_epsilon(u).lower, 0.07);
  EXPECT_EQ(u.x, base.x);
  EXPECT_EQ(u.y, base.y);
}

TEST(InjectViolation, NeverExceedsWindow) {
  const auto base = generate_comonotonic(997, UniformLaw{0, 1}, UniformLaw{0, 1}, 1);
  for (const std::size_t d : {1u, 2u, 5u, 13u, 100u, 996u}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto u = inject_violation(base, d, s);
      ASSERT_TRUE(u.is_bijection());
      const auto [down, up] = displacement(u);
      EXPECT_LE(up, d);
      EXPECT_LE(down, d);
      EXPECT_EQ(std::max(up, down), d);
    }
  }
  EXPECT_TRUE(inject_violation(base, 0, 1).equal_rank_matching());
  EXPECT_THROW(inject_violation(base, 997, 1), Error);
}

TEST(TrueEpsilon, MatchesExhaustiveScan) {
  const auto base = generate_comonotonic(500, UniformLaw{0, 1}, UniformLaw{0, 1}, 2);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto u = inject_violation(base, 1 + s * 7, s);
    const auto [down, up] = displacement(u);
    EXPECT_DOUBLE_EQ(true_epsilon(u).upper, static_cast<double>(up) / 500);
    EXPECT_DOUBLE_EQ(true_epsilon(u).lower, static_cast<double>(down) / 500);
  }
}

TEST(Quantize, NearestRankExamples) {
  const auto v = one_to(100);
  EXPECT_EQ(nearest_rank(v, 0.5), 50.0);
  EXPECT_EQ(nearest_rank(v, 0.15), 15.0);
  EXPECT_EQ(nearest_rank(v, 0.151), 16.0);
  const auto w = one_to(4);
  const auto s = quantize_marginal(w, QuantileLabels({0.25, 0.75}));
  EXPECT_EQ(s.value(0), 1.0);
  EXPECT_EQ(s.value(1), 3.0);
}

TEST(Quantize, PairCarriesMetaAndBothMarginals) {
  const auto u = generate_comonotonic(one_to(100), Affine{1, 0}, Affine{1, 10});
  const auto p = quantize(u, QuantileLabels::hub_default(), PairMeta{"m", "t", "l", 1, 2});
  EXPECT_EQ(p.x().value(11), 50.0);
  EXPECT_EQ(p.y().value(11), 60.0);
  EXPECT_EQ(p.meta().week, 1);
}

TEST(CoverageCheck, CountsInclusiveHits) {
  ConfidenceInterval ci;
  ci.lower = 2;
  ci.upper = 4;
  const std::vector<double> z{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(coverage_check(ci, z), 0.6);
  EXPECT_EQ(coverage_check(ci, std::vector<double>{}), 0.0);
}

TEST(GenerateWeekly, PreDivergenceWeeksShareTheLaw) {
  SimulationSpec spec;
  spec.n = 2000;
  spec.window = 50;
  const auto weeks = generate_weekly(spec);
  ASSERT_EQ(weeks.size(), 4u);
  for (const auto& w : weeks) {
    if (w.week < spec.t_app) {
      EXPECT_EQ(w.universe.x, w.universe.y);
    } else {
      EXPECT_NE(w.universe.x, w.universe.y);
    }
    EXPECT_DOUBLE_EQ(w.epsilon.upper, 0.025);
  }
  const auto again = generate_weekly(spec);
  for (std::size_t i = 0; i < weeks.size(); ++i) {
    EXPECT_EQ(weeks[i].universe.match, again[i].universe.match);
  }
}

TEST(GenerateWeekly, GrowthScalesValues) {
  SimulationSpec spec;
  spec.n = 500;
  spec.weekly_growth = 0.1;
  spec.x_law = UniformLaw{100, 200};
  const auto weeks = generate_weekly(spec);
  EXPECT_GT(weeks[3].universe.x.front(), 100.0 * 1.331 - 1e-9);
  EXPECT_LT(weeks[3].universe.x.back(), 200.0 * 1.331 + 1e-9);
}
