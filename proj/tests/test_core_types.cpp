#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "scenbound/bounding.hpp"
#include "scenbound/core_types.hpp"

using namespace scenbound;

namespace {

QuantileLabels three() { return QuantileLabels({0.25, 0.5, 0.75}); }

}  // namespace

TEST(QuantileLabels, RejectsBadGrids) {
  EXPECT_THROW(QuantileLabels({0.5}), Error);
  EXPECT_THROW(QuantileLabels({0.0, 0.5}), Error);
  EXPECT_THROW(QuantileLabels({0.5, 1.0}), Error);
  EXPECT_THROW(QuantileLabels({0.5, 0.5}), Error);
  EXPECT_THROW(QuantileLabels({0.6, 0.5}), Error);
  EXPECT_NO_THROW(QuantileLabels({0.1, 0.9}));
}

TEST(QuantileLabels, HubDefaultGrid) {
  const auto q = QuantileLabels::hub_default();
  ASSERT_EQ(q.size(), 23u);
  EXPECT_DOUBLE_EQ(q[0], 0.01);
  EXPECT_DOUBLE_EQ(q[1], 0.025);
  EXPECT_DOUBLE_EQ(q[2], 0.05);
  EXPECT_DOUBLE_EQ(q[3], 0.10);
  EXPECT_DOUBLE_EQ(q[11], 0.5);
  EXPECT_DOUBLE_EQ(q[20], 0.95);
  EXPECT_DOUBLE_EQ(q[21], 0.975);
  EXPECT_DOUBLE_EQ(q[22], 0.99);
}

TEST(QuantileLabels, UniformGridHitsBothEnds) {
  const auto q = QuantileLabels::uniform(201);
  EXPECT_EQ(q.size(), 201u);
  EXPECT_EQ(q.front(), 0.01);
  EXPECT_EQ(q.back(), 0.99);
}

TEST(ValidateSeries, AcceptsSortedValues) {
  const auto s = validate_series(three(), {1, 2, 3});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_FALSE(s.has_ties());
}

TEST(ValidateSeries, RejectsDecreasingValues) {
  try {
    validate_series(three(), {3, 2, 1});
    FAIL() << "expected NonMonotoneValues";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotoneValues);
  }
}

TEST(ValidateSeries, ConstantSeriesIsLegalWithTieFlag) {
  const auto s = validate_series(three(), {2, 2, 2});
  EXPECT_TRUE(s.has_ties());
}

TEST(ValidateSeries, LengthAndFinitenessErrors) {
  try {
    validate_series(three(), {1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  try {
    validate_series(three(), {1, std::numeric_limits<double>::quiet_NaN(), 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
  }
  try {
    validate_series(three(), {1, 2, std::numeric_limits<double>::infinity()});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
  }
}

TEST(PointwiseUpperRole, PicksLargerValueAtIndex) {
  const auto x = validate_series(three(), {1, 2, 3});
  const auto y = validate_series(three(), {0, 5, 5});
  {
    const auto [up, lo] = pointwise_upper_role(x, y, 0);
    EXPECT_EQ(&up, &x);
    EXPECT_EQ(&lo, &y);
  }
  {
    const auto [up, lo] = pointwise_upper_role(x, y, 1);
    EXPECT_EQ(&up, &y);
    EXPECT_EQ(&lo, &x);
  }
}

TEST(PointwiseUpperRole, TiesKeepArgumentOrder) {
  const auto x = validate_series(three(), {1, 2, 3});
  const auto y = validate_series(three(), {1, 2, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [up, lo] = pointwise_upper_role(x, y, i);
    EXPECT_EQ(&up, &x);
    EXPECT_EQ(&lo, &y);
  }
  EXPECT_THROW(pointwise_upper_role(x, y, 3), Error);
}

TEST(ScenarioPair, RequiresMatchingLabels) {
  const auto x = validate_series(three(), {1, 2, 3});
  const auto y = validate_series(QuantileLabels({0.2, 0.5, 0.8}), {1, 2, 3});
  try {
    ScenarioPair(x, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LabelMismatch);
  }
  EXPECT_THROW(ScenarioPair(x, x, PairMeta{"m", "t", "l", -1, 0}), Error);
}

TEST(ScenarioPair, PreDivergenceMeansWeekBeforeTapp) {
  const auto x = validate_series(three(), {1, 2, 3});
  EXPECT_TRUE(ScenarioPair(x, x, PairMeta{"", "", "", 0, 1}).pre_divergence());
  EXPECT_FALSE(ScenarioPair(x, x, PairMeta{"", "", "", 1, 1}).pre_divergence());
  EXPECT_FALSE(ScenarioPair(x, x, PairMeta{"", "", "", 0, 0}).pre_divergence());
}

TEST(ViolationParams, RangeChecked) {
  EXPECT_THROW(ViolationParams(-0.1, 0.0), Error);
  EXPECT_THROW(ViolationParams(0.0, 1.5), Error);
  const ViolationParams v(0.1, 0.2, Provenance::Estimated);
  EXPECT_EQ(v.lower, 0.1);
  EXPECT_EQ(v.upper, 0.2);
}

TEST(BoundSamples, CountsOrderingViolations) {
  BoundSamples s{{1, 2, 3}, {0, 2, 4}, 0};
  EXPECT_EQ(s.ordering_violations(), 1u);
  s.z_lower.pop_back();
  EXPECT_GE(s.ordering_violations(), 1u);
}
