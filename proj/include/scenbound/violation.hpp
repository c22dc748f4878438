#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "scenbound/core_types.hpp"
#include "scenbound/error.hpp"
#include "scenbound/monotone_interp.hpp"

namespace scenbound {

/// How the inner indices of the quantile-crossing estimator are chosen.
///
/// Conservative: for index i the upper contribution uses the smallest
/// k <= i-1 with upper[k] >= lower[i-1] and the lower contribution the
/// largest k >= i+1 with lower[k] <= upper[i+1]. Literal: largest k <= i
/// with upper[k] >= lower[i-1] and smallest k >= i with lower[k] >=
/// upper[i+1], read verbatim from the original pseudocode. Only the
/// conservative form is guaranteed to round outward.
enum class EstimateMode { Conservative, Literal };

struct EpsilonContribution {
  int week = 0;
  std::size_t index = 0;
  double upper = 0.0;
  double lower = 0.0;
};

struct WeekEpsilon {
  int week = 0;
  double lower = 0.0;
  double upper = 0.0;
};

struct EpsilonTrace {
  std::vector<EpsilonContribution> contributions;
  ViolationParams final;

  /// Per-week maxima of the contributions, ordered by week.
  std::vector<WeekEpsilon> per_week() const {
    std::map<int, WeekEpsilon> acc;
    for (const auto& c : contributions) {
      auto [it, inserted] = acc.try_emplace(c.week, WeekEpsilon{c.week, 0.0, 0.0});
      it->second.lower = std::max(it->second.lower, c.lower);
      it->second.upper = std::max(it->second.upper, c.upper);
    }
    std::vector<WeekEpsilon> out;
    for (const auto& [week, w] : acc) out.push_back(w);
    return out;
  }
};

namespace detail {

inline void check_pre_divergence_input(std::span<const ScenarioPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no pre-divergence weeks supplied");
  const auto& labels = pairs.front().labels();
  for (const auto& p : pairs) {
    if (!(p.labels() == labels)) {
      throw Error(ErrorCode::LabelMismatch,
                  "week " + std::to_string(p.meta().week) + " uses a different label set");
    }
    if (!p.pre_divergence()) {
      throw Error(ErrorCode::InvalidArgument,
                  "week " + std::to_string(p.meta().week) + " is not before t_app=" +
                      std::to_string(p.meta().t_app));
    }
  }
}

}  // namespace detail

/// Estimated violation from the pre-divergence weeks: maxima of the
/// per-index rank gaps between the pointwise upper and lower series.
inline EpsilonTrace estimate_epsilon(std::span<const ScenarioPair> pairs,
                                     EstimateMode mode = EstimateMode::Conservative) {
  detail::check_pre_divergence_input(pairs);
  EpsilonTrace trace;
  double eps_u = 0.0;
  double eps_l = 0.0;
  for (const auto& pair : pairs) {
    const auto& q = pair.labels();
    const std::size_t m = q.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto [up, lo] = pointwise_upper_role(pair.x(), pair.y(), i);
      const auto U = up.values();
      const auto L = lo.values();

      std::optional<std::size_t> alpha;
      if (i >= 1) {
        const double target = L[i - 1];
        if (mode == EstimateMode::Conservative) {
          for (std::size_t k = 0; k <= i - 1; ++k) {
            if (U[k] >= target) {
              alpha = k;
              break;
            }
          }
        } else {
          for (std::size_t k = i + 1; k-- > 0;) {
            if (U[k] >= target) {
              alpha = k;
              break;
            }
          }
        }
      }

      std::optional<std::size_t> beta;
      if (i + 1 < m) {
        const double target = U[i + 1];
        if (mode == EstimateMode::Conservative) {
          for (std::size_t k = m; k-- > i + 1;) {
            if (L[k] <= target) {
              beta = k;
              break;
            }
          }
        } else {
          for (std::size_t k = i; k < m; ++k) {
            if (L[k] >= target) {
              beta = k;
              break;
            }
          }
        }
      }

      EpsilonContribution c{pair.meta().week, i, 0.0, 0.0};
      if (alpha) c.upper = std::max(0.0, q[i] - q[*alpha]);
      if (beta) c.lower = std::max(0.0, q[*beta] - q[i]);
      eps_u = std::max(eps_u, c.upper);
      eps_l = std::max(eps_l, c.lower);
      trace.contributions.push_back(c);
    }
  }
  trace.final = ViolationParams(clamp_probability(eps_l), clamp_probability(eps_u),
                                Provenance::Estimated);
  return trace;
}

struct ApproxTrace {
  std::vector<WeekEpsilon> weeks;
  ViolationParams final;
  bool degenerate = false;  // some week had a single-valued series
};

/// Interpolated violation: per week, the extrema of F_y(v) - F_x(v) over a
/// uniform grid spanning all reported values of both series, with both
/// CDFs interpolated by PCHIP.
inline ApproxTrace approx_epsilon_trace(std::span<const ScenarioPair> pairs,
                                        std::size_t grid_points = 1001) {
  detail::check_pre_divergence_input(pairs);
  if (grid_points < 101) {
    throw Error(ErrorCode::InvalidArgument, "grid_points must be at least 101");
  }
  ApproxTrace out;
  double eps_u = 0.0;
  double eps_l = 0.0;
  for (const auto& pair : pairs) {
    const auto fx = build_cdf_interpolant(pair.x());
    const auto fy = build_cdf_interpolant(pair.y());
    out.degenerate = out.degenerate || fx.degenerate() || fy.degenerate();
    const double lo = std::min(pair.x().values().front(), pair.y().values().front());
    const double hi = std::max(pair.x().values().back(), pair.y().values().back());
    double dmax = 0.0;
    double dmin = 0.0;
    for (std::size_t g = 0; g < grid_points; ++g) {
      const double v = g + 1 == grid_points
                           ? hi
                           : lo + (hi - lo) * static_cast<double>(g) /
                                      static_cast<double>(grid_points - 1);
      const double d = fy(v) - fx(v);
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    WeekEpsilon w{pair.meta().week, clamp_probability(-dmin), clamp_probability(dmax)};
    eps_u = std::max(eps_u, w.upper);
    eps_l = std::max(eps_l, w.lower);
    out.weeks.push_back(w);
  }
  out.final = ViolationParams(eps_l, eps_u, Provenance::Interpolated);
  return out;
}

inline ViolationParams approx_epsilon(std::span<const ScenarioPair> pairs,
                                      std::size_t grid_points = 1001) {
  return approx_epsilon_trace(pairs, grid_points).final;
}

}  // namespace scenbound
