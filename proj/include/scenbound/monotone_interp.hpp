#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "scenbound/core_types.hpp"
#include "scenbound/error.hpp"

namespace scenbound {

/// Shape-preserving piecewise cubic Hermite interpolant (PCHIP).
///
/// Slopes follow the Fritsch-Carlson weighted harmonic mean in the interior
/// and a one-sided three-point formula at both ends, limited so that
/// monotone data yield a monotone interpolant. Outside the knot range the
/// interpolant is clamped to the end knot values.
class MonotoneInterpolant {
 public:
  MonotoneInterpolant() = default;

  MonotoneInterpolant(std::vector<double> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.empty() || xs_.size() != ys_.size()) {
      throw Error(ErrorCode::LengthMismatch, "interpolant needs matching, non-empty knot lists");
    }
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
        throw Error(ErrorCode::NonFiniteValue, "knot " + std::to_string(i));
      }
      if (i > 0 && !(xs_[i - 1] < xs_[i])) {
        throw Error(ErrorCode::InvalidArgument, "knot abscissae must be strictly increasing");
      }
    }
    derivs_ = slopes(xs_, ys_);
  }

  /// Step surrogate used when the data collapse to one point: evaluates to
  /// `below` left of the single knot and to the knot value from it onward.
  static MonotoneInterpolant step(double at, double below, double from) {
    MonotoneInterpolant m({at}, {from});
    m.step_below_ = below;
    return m;
  }

  double operator()(double x) const { return eval(x); }

  double eval(double x) const {
    if (xs_.empty()) throw Error(ErrorCode::EmptyInput, "evaluating an empty interpolant");
    if (std::isnan(x)) return x;
    if (x < xs_.front()) return step_below_ ? *step_below_ : ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double h = xs_[k + 1] - xs_[k];
    const double t = (x - xs_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    const double v =
        h00 * ys_[k] + h10 * h * derivs_[k] + h01 * ys_[k + 1] + h11 * h * derivs_[k + 1];
    // The exact cubic stays between its end values on monotone data; this
    // only removes round-off excursions.
    const auto [lo, hi] = std::minmax(ys_[k], ys_[k + 1]);
    return std::clamp(v, lo, hi);
  }

  std::span<const double> knots_x() const noexcept { return xs_; }
  std::span<const double> knots_y() const noexcept { return ys_; }
  std::span<const double> derivs() const noexcept { return derivs_; }
  double x_min() const { return xs_.front(); }
  double x_max() const { return xs_.back(); }

  /// Set when the source series had a single distinct value.
  bool degenerate() const noexcept { return degenerate_; }
  void mark_degenerate() noexcept { degenerate_ = true; }

 private:
  static int sign(double v) { return (v > 0) - (v < 0); }

  static double edge_slope(double h0, double h1, double m0, double m1) {
    double d = ((2 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (sign(d) != sign(m0)) {
      d = 0.0;
    } else if (sign(m0) != sign(m1) && std::abs(d) > 3 * std::abs(m0)) {
      d = 3 * m0;
    }
    return d;
  }

  static std::vector<double> slopes(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = x[k + 1] - x[k];
      m[k] = (y[k + 1] - y[k]) / h[k];
    }
    if (n == 2) {
      d[0] = d[1] = m[0];
      return d;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (sign(m[k - 1]) * sign(m[k]) <= 0) continue;
      const double w1 = 2 * h[k] + h[k - 1];
      const double w2 = h[k] + 2 * h[k - 1];
      d[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
    }
    d[0] = edge_slope(h[0], h[1], m[0], m[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
    return d;
  }

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> derivs_;
  std::optional<double> step_below_;
  bool degenerate_ = false;
};

/// Outcome value -> probability. Runs of equal values collapse into one
/// knot carrying the largest level of the run (right-continuous CDF).
inline MonotoneInterpolant build_cdf_interpolant(const QuantileSeries& series) {
  const auto values = series.values();
  const auto& labels = series.labels();
  std::vector<double> xs, ys;
  xs.reserve(values.size());
  ys.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!xs.empty() && values[i] == xs.back()) {
      ys.back() = labels[i];
    } else {
      xs.push_back(values[i]);
      ys.push_back(labels[i]);
    }
  }
  if (xs.size() == 1) {
    auto m = MonotoneInterpolant::step(xs.front(), labels.front(), labels.back());
    m.mark_degenerate();
    return m;
  }
  return MonotoneInterpolant(std::move(xs), std::move(ys));
}

/// Probability -> outcome value (interpolated quantile function).
inline MonotoneInterpolant build_quantile_interpolant(const QuantileSeries& series) {
  const auto levels = series.labels().levels();
  const auto values = series.values();
  MonotoneInterpolant m(std::vector<double>(levels.begin(), levels.end()),
                        std::vector<double>(values.begin(), values.end()));
  if (values.front() == values.back()) m.mark_degenerate();
  return m;
}

}  // namespace scenbound
