#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scenbound/error.hpp"

namespace scenbound {

/// Strictly increasing probability levels in the open interval (0, 1).
class QuantileLabels {
 public:
  QuantileLabels() = default;

  explicit QuantileLabels(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.size() < 2) {
      throw Error(ErrorCode::InvalidLabels, "at least two quantile labels are required");
    }
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const double q = levels_[i];
      if (!std::isfinite(q) || q <= 0.0 || q >= 1.0) {
        throw Error(ErrorCode::InvalidLabels,
                    "label " + std::to_string(i) + " is outside (0, 1)");
      }
      if (i > 0 && !(levels_[i - 1] < q)) {
        throw Error(ErrorCode::InvalidLabels,
                    "labels must be strictly increasing (index " + std::to_string(i) + ")");
      }
    }
  }

  /// The 23-level grid used by multi-model scenario hubs:
  /// 0.01, 0.025, 0.05, 0.10, 0.15, ..., 0.90, 0.95, 0.975, 0.99.
  static QuantileLabels hub_default() {
    std::vector<double> q{0.01, 0.025};
    for (int k = 1; k <= 19; ++k) q.push_back(k / 20.0);
    q.push_back(0.975);
    q.push_back(0.99);
    return QuantileLabels(std::move(q));
  }

  /// `count` levels evenly spaced over [lo, hi] inclusive.
  static QuantileLabels uniform(std::size_t count, double lo = 0.01, double hi = 0.99) {
    if (count < 2) throw Error(ErrorCode::InvalidLabels, "uniform grid needs at least two levels");
    std::vector<double> q(count);
    for (std::size_t k = 0; k < count; ++k) {
      q[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    q.back() = hi;
    return QuantileLabels(std::move(q));
  }

  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }
  double front() const { return levels_.front(); }
  double back() const { return levels_.back(); }
  std::span<const double> levels() const noexcept { return levels_; }
  auto begin() const noexcept { return levels_.begin(); }
  auto end() const noexcept { return levels_.end(); }

  friend bool operator==(const QuantileLabels&, const QuantileLabels&) = default;

 private:
  std::vector<double> levels_;
};

/// One forecast distribution reported as values at a fixed set of levels.
class QuantileSeries {
 public:
  QuantileSeries() = default;

  const QuantileLabels& labels() const noexcept { return labels_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_.at(i); }
  double level(std::size_t i) const { return labels_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// True when at least two adjacent values are equal (stair-like CDF).
  bool has_ties() const noexcept { return has_ties_; }

  friend bool operator==(const QuantileSeries& a, const QuantileSeries& b) {
    return a.labels_ == b.labels_ && a.values_ == b.values_;
  }

 private:
  friend QuantileSeries validate_series(QuantileLabels labels, std::vector<double> values);

  QuantileLabels labels_;
  std::vector<double> values_;
  bool has_ties_ = false;
};

inline QuantileSeries validate_series(QuantileLabels labels, std::vector<double> values) {
  if (labels.size() != values.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(labels.size()) + " labels but " +
                                               std::to_string(values.size()) + " values");
  }
  bool ties = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteValue, "value at index " + std::to_string(i));
    }
    if (i > 0) {
      if (values[i] < values[i - 1]) {
        throw Error(ErrorCode::NonMonotoneValues,
                    "value decreases at index " + std::to_string(i));
      }
      ties = ties || values[i] == values[i - 1];
    }
  }
  QuantileSeries s;
  s.labels_ = std::move(labels);
  s.values_ = std::move(values);
  s.has_ties_ = ties;
  return s;
}

struct PairMeta {
  std::string model;
  std::string target;
  std::string location;
  int week = 0;   // 0 is the first projected week
  int t_app = 0;  // week at which the scenarios start to differ

  friend bool operator==(const PairMeta&, const PairMeta&) = default;
};

/// Two scenario projections of the same outcome. Differences are taken
/// as x - y, so the caller fixes the orientation by argument order.
class ScenarioPair {
 public:
  ScenarioPair(QuantileSeries x, QuantileSeries y, PairMeta meta = {})
      : x_(std::move(x)), y_(std::move(y)), meta_(std::move(meta)) {
    if (!(x_.labels() == y_.labels())) {
      throw Error(ErrorCode::LabelMismatch, "scenario series use different quantile labels");
    }
    if (meta_.week < 0 || meta_.t_app < 0) {
      throw Error(ErrorCode::InvalidArgument, "week and t_app must be non-negative");
    }
  }

  const QuantileSeries& x() const noexcept { return x_; }
  const QuantileSeries& y() const noexcept { return y_; }
  const PairMeta& meta() const noexcept { return meta_; }
  const QuantileLabels& labels() const noexcept { return x_.labels(); }

  /// Weeks before the divergence point; with 0-based weeks this is
  /// week < t_app, i.e. the first t_app projected weeks.
  bool pre_divergence() const noexcept { return meta_.week < meta_.t_app; }

  friend bool operator==(const ScenarioPair&, const ScenarioPair&) = default;

 private:
  QuantileSeries x_;
  QuantileSeries y_;
  PairMeta meta_;
};

/// Returns (upper, lower): the series whose value at index i is larger
/// comes first; ties keep the argument order.
inline std::pair<const QuantileSeries&, const QuantileSeries&> pointwise_upper_role(
    const QuantileSeries& x, const QuantileSeries& y, std::size_t i) {
  if (!(x.labels() == y.labels())) {
    throw Error(ErrorCode::LabelMismatch, "series use different quantile labels");
  }
  if (i >= x.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(i) + " with " + std::to_string(x.size()) + " levels");
  }
  if (x.value(i) >= y.value(i)) return {x, y};
  return {y, x};
}

enum class Provenance { Estimated, Interpolated, UserSupplied };

constexpr std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Estimated: return "estimated";
    case Provenance::Interpolated: return "interpolated";
    case Provenance::UserSupplied: return "user-supplied";
  }
  return "unknown";
}

/// Largest rank mismatch, in probability units, between matched outcomes:
/// `upper` when the y partner sits above x's rank, `lower` when below.
struct ViolationParams {
  double lower = 0.0;
  double upper = 0.0;
  Provenance provenance = Provenance::UserSupplied;

  ViolationParams() = default;
  ViolationParams(double eps_l, double eps_u, Provenance p = Provenance::UserSupplied)
      : lower(eps_l), upper(eps_u), provenance(p) {
    if (!(eps_l >= 0.0 && eps_l <= 1.0) || !(eps_u >= 0.0 && eps_u <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "violation parameters must lie in [0, 1]");
    }
  }

  static ViolationParams zero() { return {}; }

  friend bool operator==(const ViolationParams&, const ViolationParams&) = default;
};

inline double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

/// Paired Monte Carlo draws; entry k of both lists comes from the same
/// uniform draw, so z_lower[k] <= z_upper[k].
struct BoundSamples {
  std::vector<double> z_upper;
  std::vector<double> z_lower;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return z_upper.size(); }
  bool empty() const noexcept { return z_upper.empty(); }

  /// Number of draws breaking the pairwise ordering (expected 0).
  std::size_t ordering_violations() const {
    std::size_t bad = z_upper.size() == z_lower.size() ? 0 : 1;
    const std::size_t n = std::min(z_upper.size(), z_lower.size());
    for (std::size_t k = 0; k < n; ++k) bad += z_lower[k] > z_upper[k] ? 1 : 0;
    return bad;
  }
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.0;
  double p_low = 0.0;   // tail split used for `lower`
  double p_high = 1.0;  // tail split used for `upper`
  /// fraction(z_upper <= upper) - fraction(z_lower < lower); a lower
  /// bound on P(lower <= Z <= upper).
  double certificate = 0.0;

  bool contains(double z) const noexcept { return lower <= z && z <= upper; }
  bool contains(const ConfidenceInterval& other) const noexcept {
    return lower <= other.lower && other.upper <= upper;
  }
  double width() const noexcept { return upper - lower; }
};

}  // namespace scenbound
