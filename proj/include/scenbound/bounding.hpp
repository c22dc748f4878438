#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "scenbound/core_types.hpp"
#include "scenbound/error.hpp"
#include "scenbound/monotone_interp.hpp"
#include "scenbound/random.hpp"

namespace scenbound {

enum class BoundMethod { QuantileGrid, Interpolated };

constexpr std::string_view to_string(BoundMethod m) noexcept {
  return m == BoundMethod::QuantileGrid ? "grid" : "interp";
}

struct BoundConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
  BoundMethod method = BoundMethod::QuantileGrid;
  ViolationParams violation;
};

namespace detail {

inline void check_config(const BoundConfig& cfg) {
  if (cfg.n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
}

}  // namespace detail

/// Bounds drawn on the reported quantile grid. For each uniform draw u the
/// lower level is the largest label <= max(u - eps_l, min label) and the
/// upper level the smallest label >= min(u + eps_u, max label); then
///   z_upper = X(q_u) - Y(q_l),  z_lower = X(q_l) - Y(q_u).
/// With eps = 0 this is the zero-violation bound.
inline BoundSamples sample_bounds_grid(const ScenarioPair& pair, const BoundConfig& cfg) {
  detail::check_config(cfg);
  const auto levels = pair.labels().levels();
  const auto xv = pair.x().values();
  const auto yv = pair.y().values();
  const double q_min = levels.front();
  const double q_max = levels.back();
  const CounterRng rng(cfg.seed);

  BoundSamples out;
  out.seed = cfg.seed;
  out.z_upper.resize(cfg.n_samples);
  out.z_lower.resize(cfg.n_samples);
  for (std::size_t k = 0; k < cfg.n_samples; ++k) {
    const double u = rng.uniform(k);
    const double a = std::max(u - cfg.violation.lower, q_min);
    const double b = std::min(u + cfg.violation.upper, q_max);
    const auto il = static_cast<std::size_t>(
        std::upper_bound(levels.begin(), levels.end(), a) - levels.begin() - 1);
    const auto iu = static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), b) - levels.begin());
    out.z_upper[k] = xv[iu] - yv[il];
    out.z_lower[k] = xv[il] - yv[iu];
  }
  return out;
}

/// Bounds drawn from PCHIP-interpolated quantile functions at the shifted
/// levels u - eps_l and u + eps_u, each clamped to the reported label range.
inline BoundSamples sample_bounds_interp(const ScenarioPair& pair, const BoundConfig& cfg) {
  detail::check_config(cfg);
  const auto qx = build_quantile_interpolant(pair.x());
  const auto qy = build_quantile_interpolant(pair.y());
  const double q_min = pair.labels().front();
  const double q_max = pair.labels().back();
  const CounterRng rng(cfg.seed);

  BoundSamples out;
  out.seed = cfg.seed;
  out.z_upper.resize(cfg.n_samples);
  out.z_lower.resize(cfg.n_samples);
  for (std::size_t k = 0; k < cfg.n_samples; ++k) {
    const double u = rng.uniform(k);
    const double ql = std::clamp(u - cfg.violation.lower, q_min, q_max);
    const double qu = std::clamp(u + cfg.violation.upper, q_min, q_max);
    out.z_upper[k] = qx(qu) - qy(ql);
    out.z_lower[k] = qx(ql) - qy(qu);
  }
  return out;
}

inline BoundSamples sample_bounds(const ScenarioPair& pair, const BoundConfig& cfg) {
  return cfg.method == BoundMethod::QuantileGrid ? sample_bounds_grid(pair, cfg)
                                                 : sample_bounds_interp(pair, cfg);
}

enum class TailSplit { Symmetric, Shortest };

constexpr std::string_view to_string(TailSplit s) noexcept {
  return s == TailSplit::Symmetric ? "symmetric" : "shortest";
}

namespace detail {

struct SortedSamples {
  std::vector<double> upper;
  std::vector<double> lower;

  explicit SortedSamples(const BoundSamples& s) : upper(s.z_upper), lower(s.z_lower) {
    std::sort(upper.begin(), upper.end());
    std::sort(lower.begin(), lower.end());
  }

  // Upper nearest rank: at least ceil(p n) samples are <= the result.
  // The 1e-9 slack absorbs rounding in levels like (1 + alpha) / 2.
  double upper_at(double p) const {
    const auto n = static_cast<double>(upper.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, upper.size());
    return upper[rank - 1];
  }

  // Lower nearest rank: at most floor(p n) samples are < the result.
  double lower_at(double p) const {
    const auto n = static_cast<double>(lower.size());
    auto idx = static_cast<std::size_t>(std::floor(p * n + 1e-9));
    idx = std::min(idx, lower.size() - 1);
    return lower[idx];
  }

  double certificate(double l, double u) const {
    const auto n = static_cast<double>(upper.size());
    const auto up = std::upper_bound(upper.begin(), upper.end(), u) - upper.begin();
    const auto lo = std::lower_bound(lower.begin(), lower.end(), l) - lower.begin();
    return static_cast<double>(up) / n - static_cast<double>(lo) / n;
  }
};

}  // namespace detail

/// Interval [l, u] whose certificate fraction(z_upper <= u) -
/// fraction(z_lower < l) is at least alpha. Because z_lower <= Z <= z_upper
/// holds draw by draw, the certificate lower-bounds P(l <= Z <= u).
inline ConfidenceInterval extract_ci(const BoundSamples& samples, double alpha,
                                     TailSplit split = TailSplit::Symmetric) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "no bound samples");
  if (samples.z_upper.size() != samples.z_lower.size()) {
    throw Error(ErrorCode::LengthMismatch, "z_upper and z_lower differ in length");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  const detail::SortedSamples sorted(samples);

  ConfidenceInterval ci;
  ci.alpha = alpha;
  auto consider = [&](double p_low, double p_high, bool first) {
    const double l = sorted.lower_at(p_low);
    const double u = sorted.upper_at(p_high);
    if (first || u - l < ci.upper - ci.lower) {
      ci.lower = l;
      ci.upper = u;
      ci.p_low = p_low;
      ci.p_high = p_high;
    }
  };

  if (split == TailSplit::Symmetric) {
    consider((1.0 - alpha) / 2.0, (1.0 + alpha) / 2.0, true);
  } else {
    const auto steps = static_cast<std::size_t>(std::floor((1.0 - alpha) * 1000.0 + 1e-9));
    for (std::size_t k = 0; k <= steps; ++k) {
      const double p_low = static_cast<double>(k) / 1000.0;
      consider(p_low, std::min(1.0, p_low + alpha), k == 0);
    }
  }
  ci.certificate = sorted.certificate(ci.lower, ci.upper);
  return ci;
}

struct WidthRow {
  std::size_t label_count = 0;
  double mean_width = 0.0;
  double std_error = 0.0;
};

/// Mean of z_upper - z_lower for the same distribution quantized at each
/// label count. Labels are evenly spaced over [lo, hi].
inline std::vector<WidthRow> width_convergence_probe(
    const std::function<ScenarioPair(const QuantileLabels&)>& make_pair,
    std::span<const std::size_t> label_counts, const BoundConfig& cfg, double lo = 0.01,
    double hi = 0.99) {
  std::vector<WidthRow> rows;
  for (const std::size_t count : label_counts) {
    const auto pair = make_pair(QuantileLabels::uniform(count, lo, hi));
    const auto s = sample_bounds(pair, cfg);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double w = s.z_upper[k] - s.z_lower[k];
      sum += w;
      sum_sq += w * w;
    }
    const auto n = static_cast<double>(s.size());
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    rows.push_back({count, mean, std::sqrt(var / n)});
  }
  return rows;
}

}  // namespace scenbound
