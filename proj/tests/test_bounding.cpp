#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "scenbound/bounding.hpp"
#include "scenbound/oracle_sim.hpp"
#include "scenbound/random.hpp"

using namespace scenbound;

namespace {

ScenarioPair hub_pair(double shift) {
  const auto q = QuantileLabels::hub_default();
  std::vector<double> y;
  for (std::size_t i = 0; i < q.size(); ++i) y.push_back(50.0 + 3.0 * i + 0.1 * i * i);
  std::vector<double> x = y;
  for (auto& v : x) v += shift;
  return ScenarioPair(validate_series(q, x), validate_series(q, y));
}

BoundConfig config(BoundMethod m, std::size_t n = 20000, std::uint64_t seed = 3,
                   ViolationParams eps = ViolationParams::zero()) {
  BoundConfig c;
  c.n_samples = n;
  c.seed = seed;
  c.method = m;
  c.violation = eps;
  return c;
}

double mean_width(const BoundSamples& s) {
  double w = 0;
  for (std::size_t k = 0; k < s.size(); ++k) w += s.z_upper[k] - s.z_lower[k];
  return w / static_cast<double>(s.size());
}

}  // namespace

TEST(SampleBounds, IdenticalScenariosContainZero) {
  for (const auto m : {BoundMethod::QuantileGrid, BoundMethod::Interpolated}) {
    const auto ci = extract_ci(sample_bounds(hub_pair(0), config(m)), 0.8);
    EXPECT_TRUE(ci.contains(0.0)) << to_string(m);
    EXPECT_GE(ci.certificate, 0.8);
  }
}

TEST(SampleBounds, ConstantShiftIsContained) {
  for (const auto m : {BoundMethod::QuantileGrid, BoundMethod::Interpolated}) {
    const auto ci = extract_ci(sample_bounds(hub_pair(10), config(m)), 0.8);
    EXPECT_TRUE(ci.contains(10.0)) << to_string(m);
  }
}

TEST(SampleBounds, InterpolatedZeroViolationCollapses) {
  const auto s = sample_bounds(hub_pair(10), config(BoundMethod::Interpolated));
  EXPECT_EQ(s.z_upper, s.z_lower);
  const auto ci = extract_ci(s, 0.8);
  EXPECT_NEAR(ci.lower, 10.0, 1e-9);
  EXPECT_NEAR(ci.upper, 10.0, 1e-9);
}

TEST(SampleBounds, GridSamplesAreOrdered) {
  for (const auto eps : {0.0, 0.05, 0.2}) {
    const auto s = sample_bounds(hub_pair(-7), config(BoundMethod::QuantileGrid, 20000, 9,
                                                      ViolationParams(eps, eps)));
    EXPECT_EQ(s.ordering_violations(), 0u);
  }
}

TEST(SampleBounds, SameSeedSameSamples) {
  const auto a = sample_bounds(hub_pair(1), config(BoundMethod::QuantileGrid, 5000, 42));
  const auto b = sample_bounds(hub_pair(1), config(BoundMethod::QuantileGrid, 5000, 42));
  const auto c = sample_bounds(hub_pair(1), config(BoundMethod::QuantileGrid, 5000, 43));
  EXPECT_EQ(a.z_upper, b.z_upper);
  EXPECT_EQ(a.z_lower, b.z_lower);
  EXPECT_NE(a.z_upper, c.z_upper);
}

TEST(SampleBounds, ViolationWidensBounds) {
  const auto pair = hub_pair(0);
  double prev = -1;
  for (const auto eps : {0.0, 0.01, 0.05, 0.1}) {
    const auto s = sample_bounds(pair, config(BoundMethod::QuantileGrid, 20000, 1,
                                              ViolationParams(eps, eps)));
    const double w = mean_width(s);
    EXPECT_GE(w, prev);
    prev = w;
  }
}

TEST(SampleBounds, InterpNarrowerThanGrid) {
  const auto eps = ViolationParams(0.05, 0.05);
  const auto g = extract_ci(sample_bounds(hub_pair(3), config(BoundMethod::QuantileGrid, 20000,
                                                              1, eps)), 0.8);
  const auto i = extract_ci(sample_bounds(hub_pair(3), config(BoundMethod::Interpolated, 20000,
                                                              1, eps)), 0.8);
  EXPECT_LE(i.width(), g.width());
}

TEST(SampleBounds, RejectsZeroSamples) {
  EXPECT_THROW(sample_bounds(hub_pair(0), config(BoundMethod::QuantileGrid, 0)), Error);
}

TEST(ExtractCi, AllZeroSamples) {
  const BoundSamples s{std::vector<double>(1000, 0.0), std::vector<double>(1000, 0.0), 0};
  const auto ci = extract_ci(s, 0.8);
  EXPECT_EQ(ci.lower, 0.0);
  EXPECT_EQ(ci.upper, 0.0);
  EXPECT_EQ(ci.certificate, 1.0);
}

TEST(ExtractCi, UniformSamplesHitCentralQuantiles) {
  const CounterRng rng(77);
  BoundSamples s;
  for (std::size_t k = 0; k < 100000; ++k) s.z_upper.push_back(rng.uniform(k));
  s.z_lower = s.z_upper;
  const auto ci = extract_ci(s, 0.8);
  EXPECT_NEAR(ci.lower, 0.1, 0.01);
  EXPECT_NEAR(ci.upper, 0.9, 0.01);
  EXPECT_GE(ci.certificate, 0.8);
  EXPECT_EQ(ci.p_low, (1 - 0.8) / 2);
}

TEST(ExtractCi, SmallExactCase) {
  // Ten point masses 1..10: symmetric 0.8 interval is [z_(3), z_(9)].
  BoundSamples s;
  s.z_upper = {10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  s.z_lower = s.z_upper;
  const auto ci = extract_ci(s, 0.8);
  EXPECT_EQ(ci.lower, 2.0);
  EXPECT_EQ(ci.upper, 9.0);
  EXPECT_NEAR(ci.certificate, 0.8, 1e-12);
}

TEST(ExtractCi, CertificateCountsLowerTailStrictly) {
  BoundSamples s{{5, 5, 5, 5}, {1, 1, 3, 3}, 0};
  const detail::SortedSamples sorted(s);
  EXPECT_DOUBLE_EQ(sorted.certificate(3, 5), 0.5);
  EXPECT_DOUBLE_EQ(sorted.certificate(1, 5), 1.0);
  EXPECT_DOUBLE_EQ(sorted.certificate(1, 4.9), 0.0);
}

TEST(ExtractCi, NestedInAlpha) {
  const auto s = sample_bounds(hub_pair(2), config(BoundMethod::QuantileGrid, 30000, 5,
                                                   ViolationParams(0.02, 0.03)));
  const auto a50 = extract_ci(s, 0.5);
  const auto a80 = extract_ci(s, 0.8);
  const auto a95 = extract_ci(s, 0.95);
  EXPECT_TRUE(a80.contains(a50));
  EXPECT_TRUE(a95.contains(a80));
  for (const auto& ci : {a50, a80, a95}) EXPECT_GE(ci.certificate, ci.alpha);
}

TEST(ExtractCi, ShortestNoWiderThanSymmetric) {
  const auto s = sample_bounds(hub_pair(2), config(BoundMethod::QuantileGrid, 30000, 5,
                                                   ViolationParams(0.02, 0.03)));
  const auto sym = extract_ci(s, 0.8, TailSplit::Symmetric);
  const auto sh = extract_ci(s, 0.8, TailSplit::Shortest);
  EXPECT_LE(sh.width(), sym.width());
  EXPECT_GE(sh.certificate, 0.8);
}

TEST(ExtractCi, InputErrors) {
  try {
    extract_ci(BoundSamples{}, 0.8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySamples);
  }
  try {
    extract_ci(BoundSamples{{1, 2}, {1}, 0}, 0.8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  const BoundSamples ok{{1, 2}, {1, 2}, 0};
  EXPECT_THROW(extract_ci(ok, 0.0), Error);
  EXPECT_THROW(extract_ci(ok, 1.0), Error);
}

TEST(Coverage, ComonotoneUniverseCoveredAtNominalLevel) {
  const auto u = oracle::generate_comonotonic(10000, oracle::GaussianLaw{1000, 100},
                                              oracle::UniformLaw{700, 1200}, 21);
  const auto z = oracle::true_z(u);
  const auto pair = oracle::quantize(u, QuantileLabels::hub_default());
  for (const auto m : {BoundMethod::QuantileGrid, BoundMethod::Interpolated}) {
    const auto s = sample_bounds(pair, config(m, 100000, 8));
    for (const double a : {0.5, 0.8, 0.95}) {
      const auto ci = extract_ci(s, a);
      if (m == BoundMethod::QuantileGrid) {
        EXPECT_GE(oracle::coverage_check(ci, z), a - 0.01);
      }
      EXPECT_GE(ci.certificate, a);
    }
  }
}

TEST(WidthProbe, ZeroViolationShrinksWithLabelCount) {
  const auto u = oracle::generate_comonotonic(20000, oracle::GaussianLaw{1000, 150},
                                              oracle::GaussianLaw{800, 100}, 4);
  const std::vector<std::size_t> counts{11, 23, 51, 101, 201};
  const auto rows = width_convergence_probe(
      [&](const QuantileLabels& q) { return oracle::quantize(u, q); }, counts,
      config(BoundMethod::QuantileGrid, 20000, 2));
  ASSERT_EQ(rows.size(), counts.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].mean_width, rows[i - 1].mean_width);
  }
  EXPECT_LE(rows.back().mean_width / rows.front().mean_width, 0.10);
}

TEST(WidthProbe, PositiveViolationPlateaus) {
  const auto u = oracle::generate_comonotonic(20000, oracle::GaussianLaw{1000, 150},
                                              oracle::GaussianLaw{800, 100}, 4);
  const std::vector<std::size_t> counts{51, 101, 201};
  const auto rows = width_convergence_probe(
      [&](const QuantileLabels& q) { return oracle::quantize(u, q); }, counts,
      config(BoundMethod::QuantileGrid, 20000, 2, ViolationParams(0.05, 0.05)));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows.back().mean_width, 0.0);
  EXPECT_GE(rows.back().mean_width, 0.7 * rows.front().mean_width);
}
