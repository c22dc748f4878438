#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "scenbound/core_types.hpp"
#include "scenbound/error.hpp"
#include "scenbound/random.hpp"

namespace scenbound::oracle {

// Monotone maps from a shared latent draw to an outcome. UniformLaw and
// GaussianLaw expect latent values in (0, 1) and act as inverse CDFs.
struct Affine {
  double scale = 1.0;
  double shift = 0.0;
};
struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};
struct GaussianLaw {
  double mean = 0.0;
  double sd = 1.0;
};
struct PiecewiseLinear {
  std::vector<double> xs;  // strictly increasing
  std::vector<double> ys;  // non-decreasing
};

using Transform = std::variant<Affine, UniformLaw, GaussianLaw, PiecewiseLinear>;

inline void check_transform(const Transform& t) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Affine>) {
          if (!(f.scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "affine scale < 0");
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          if (!(f.lo <= f.hi)) throw Error(ErrorCode::InvalidArgument, "uniform lo > hi");
        } else if constexpr (std::is_same_v<T, GaussianLaw>) {
          if (!(f.sd > 0.0)) throw Error(ErrorCode::InvalidArgument, "gaussian sd <= 0");
        } else {
          if (f.xs.size() < 2 || f.xs.size() != f.ys.size()) {
            throw Error(ErrorCode::InvalidArgument, "piecewise-linear map needs >= 2 knots");
          }
          for (std::size_t i = 1; i < f.xs.size(); ++i) {
            if (!(f.xs[i - 1] < f.xs[i]) || f.ys[i] < f.ys[i - 1]) {
              throw Error(ErrorCode::InvalidArgument, "piecewise-linear map is not monotone");
            }
          }
        }
      },
      t);
}

inline double apply(const Transform& t, double w) {
  return std::visit(
      [w](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Affine>) {
          return f.scale * w + f.shift;
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return f.lo + (f.hi - f.lo) * w;
        } else if constexpr (std::is_same_v<T, GaussianLaw>) {
          return boost::math::quantile(boost::math::normal(f.mean, f.sd), w);
        } else {
          if (w <= f.xs.front()) return f.ys.front();
          if (w >= f.xs.back()) return f.ys.back();
          const auto it = std::upper_bound(f.xs.begin(), f.xs.end(), w);
          const auto k = static_cast<std::size_t>(it - f.xs.begin()) - 1;
          const double t = (w - f.xs[k]) / (f.xs[k + 1] - f.xs[k]);
          return f.ys[k] + t * (f.ys[k + 1] - f.ys[k]);
        }
      },
      t);
}

/// Finite joint outcome set: `x` and `y` sorted ascending, and x-rank i is
/// matched with y-rank match[i].
struct CoupledUniverse {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> match;

  std::size_t size() const noexcept { return x.size(); }

  bool is_bijection() const {
    if (match.size() != x.size() || y.size() != x.size()) return false;
    std::vector<bool> seen(match.size(), false);
    for (const auto j : match) {
      if (j >= seen.size() || seen[j]) return false;
      seen[j] = true;
    }
    return true;
  }

  bool equal_rank_matching() const {
    for (std::size_t i = 0; i < match.size(); ++i) {
      if (match[i] != i) return false;
    }
    return true;
  }
};

/// x_i = f(w_i), y_i = g(w_i) on the sorted latent list; matched ranks agree.
inline CoupledUniverse generate_comonotonic(std::vector<double> latent, const Transform& f,
                                            const Transform& g) {
  if (latent.size() < 2) throw Error(ErrorCode::InvalidArgument, "universe needs n >= 2");
  check_transform(f);
  check_transform(g);
  std::sort(latent.begin(), latent.end());
  CoupledUniverse u;
  u.x.reserve(latent.size());
  u.y.reserve(latent.size());
  for (const double w : latent) {
    u.x.push_back(apply(f, w));
    u.y.push_back(apply(g, w));
  }
  u.match.resize(latent.size());
  std::iota(u.match.begin(), u.match.end(), std::size_t{0});
  return u;
}

/// Same, with n latent draws uniform on (0, 1) from the counter stream.
inline CoupledUniverse generate_comonotonic(std::size_t n, const Transform& f, const Transform& g,
                                            std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<double> latent(n);
  for (std::size_t k = 0; k < n; ++k) latent[k] = rng.uniform(k);
  return generate_comonotonic(std::move(latent), f, g);
}

/// Permutes y-ranks inside consecutive windows of d + 1 ranks, so no
/// matched pair moves by more than d ranks. One full window (if any) has
/// its end ranks exchanged, which makes the displacement d attained.
inline CoupledUniverse inject_violation(const CoupledUniverse& base, std::size_t d,
                                        std::uint64_t seed) {
  const std::size_t n = base.size();
  if (d >= n) throw Error(ErrorCode::InvalidArgument, "window must be smaller than n");
  if (d == 0) return base;
  const CounterRng rng(seed);
  std::uint64_t draw = 0;

  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  const std::size_t width = d + 1;
  const std::size_t full_windows = n / width;
  const std::size_t forced = rng.below(draw++, full_windows);

  for (std::size_t start = 0; start < n; start += width) {
    const std::size_t end = std::min(n, start + width);
    if (start / width == forced) {
      // interior shuffled among itself, ends exchanged
      for (std::size_t i = end - 2; i > start + 1; --i) {
        const std::size_t j = start + 1 + rng.below(draw++, i - start);
        std::swap(sigma[i], sigma[j]);
      }
      std::swap(sigma[start], sigma[end - 1]);
    } else {
      for (std::size_t i = end - 1; i > start; --i) {
        const std::size_t j = start + rng.below(draw++, i - start + 1);
        std::swap(sigma[i], sigma[j]);
      }
    }
  }

  CoupledUniverse out = base;
  for (std::size_t i = 0; i < n; ++i) out.match[i] = sigma[base.match[i]];
  return out;
}

/// Exchanges the y partners of x-ranks i and j (0-based).
inline CoupledUniverse swap_ranks(const CoupledUniverse& base, std::size_t i, std::size_t j) {
  if (i >= base.size() || j >= base.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "rank outside the universe");
  }
  CoupledUniverse out = base;
  std::swap(out.match[i], out.match[j]);
  return out;
}

/// Exact violation of the matching: with empirical CDF ranks F_X(x_i) =
/// (i+1)/n and F_Y(y_j) = (j+1)/n, eps_u = max(F_Y - F_X) and
/// eps_l = -min(F_Y - F_X) over matched pairs, each floored at 0.
inline ViolationParams true_epsilon(const CoupledUniverse& u) {
  std::ptrdiff_t up = 0;
  std::ptrdiff_t down = 0;
  for (std::size_t i = 0; i < u.match.size(); ++i) {
    const auto diff = static_cast<std::ptrdiff_t>(u.match[i]) - static_cast<std::ptrdiff_t>(i);
    up = std::max(up, diff);
    down = std::max(down, -diff);
  }
  const auto n = static_cast<double>(u.size());
  return ViolationParams(static_cast<double>(down) / n, static_cast<double>(up) / n,
                         Provenance::UserSupplied);
}

/// All matched differences x_i - y_match(i), in x-rank order.
inline std::vector<double> true_z(const CoupledUniverse& u) {
  std::vector<double> z(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) z[i] = u.x[i] - u.y[u.match[i]];
  return z;
}

/// Lower nearest-rank empirical quantile of a sorted list: the smallest
/// value whose empirical CDF reaches q.
inline double nearest_rank(std::span<const double> sorted, double q) {
  const auto n = static_cast<double>(sorted.size());
  // tolerance keeps products like 0.15 * 100 from rounding up a rank
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

inline QuantileSeries quantize_marginal(std::span<const double> sorted,
                                        const QuantileLabels& labels) {
  std::vector<double> values;
  values.reserve(labels.size());
  for (const double q : labels) values.push_back(nearest_rank(sorted, q));
  return validate_series(labels, std::move(values));
}

/// What a hub submission would expose: both marginals at the given labels.
inline ScenarioPair quantize(const CoupledUniverse& u, const QuantileLabels& labels,
                             PairMeta meta = {}) {
  return ScenarioPair(quantize_marginal(u.x, labels), quantize_marginal(u.y, labels),
                      std::move(meta));
}

inline double coverage_check(const ConfidenceInterval& ci, std::span<const double> z) {
  if (z.empty()) return 0.0;
  std::size_t hit = 0;
  for (const double v : z) hit += ci.contains(v) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(z.size());
}

/// Multi-week synthetic projection of two scenarios. Weeks before t_app use
/// the x law for both scenarios; from t_app on, y follows its own law. Both
/// laws are scaled by (1 + weekly_growth)^week. The same violation window
/// applies in every week, so later weeks never exceed the early ones.
struct SimulationSpec {
  std::size_t n = 10000;
  int weeks = 4;
  int t_app = 2;
  std::uint64_t seed = 1;
  Transform x_law = GaussianLaw{1000.0, 100.0};
  Transform y_law = GaussianLaw{900.0, 90.0};
  double weekly_growth = 0.0;
  std::size_t window = 0;
  QuantileLabels labels = QuantileLabels::hub_default();
  std::string model = "oracle-sim";
  std::string target = "inc case";
  std::string location = "US";
  std::string scenario_x = "A";
  std::string scenario_y = "B";
};

struct WeekUniverse {
  int week = 0;
  CoupledUniverse universe;
  ViolationParams epsilon;
};

inline std::vector<WeekUniverse> generate_weekly(const SimulationSpec& spec) {
  if (spec.weeks < 1) throw Error(ErrorCode::InvalidArgument, "weeks must be >= 1");
  if (spec.t_app < 0) throw Error(ErrorCode::InvalidArgument, "t_app must be >= 0");
  const CounterRng root(spec.seed);
  std::vector<WeekUniverse> out;
  for (int t = 0; t < spec.weeks; ++t) {
    const CounterRng week_rng = root.fork(static_cast<std::uint64_t>(t));
    const double scale = std::pow(1.0 + spec.weekly_growth, t);
    const Transform& ylaw = t < spec.t_app ? spec.x_law : spec.y_law;
    auto base = generate_comonotonic(spec.n, spec.x_law, ylaw, week_rng.bits(0));
    for (auto& v : base.x) v *= scale;
    for (auto& v : base.y) v *= scale;
    auto uni = inject_violation(base, spec.window, week_rng.bits(1));
    const auto eps = true_epsilon(uni);
    out.push_back({t, std::move(uni), eps});
  }
  return out;
}

}  // namespace scenbound::oracle
