#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "scenbound/bounding.hpp"
#include "scenbound/core_types.hpp"
#include "scenbound/monotone_interp.hpp"
#include "scenbound/oracle_sim.hpp"
#include "scenbound/random.hpp"
#include "scenbound/violation.hpp"

namespace scenbound::validation {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 20220101;
  std::size_t trials = 100;
  std::size_t universe_n = 10000;
  std::size_t n_samples = 100000;
  /// Negative control: feed the coverage suite a violation smaller than the
  /// one injected into its universes.
  bool understate_epsilon = false;
};

/// Running count of z_lower > z_upper across every sample drawn by a suite.
struct OrderingLedger {
  std::size_t draws = 0;
  std::size_t violations = 0;

  void record(const BoundSamples& s) {
    draws += s.size();
    violations += s.ordering_violations();
  }
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline double draw(const CounterRng& rng, std::uint64_t& k, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform(k++);
}

}  // namespace detail

/// A random monotone law on the (0, 1) latent: Gaussian, uniform, or a
/// piecewise-linear map that may contain flat stretches (tied outcomes).
inline oracle::Transform random_law(const CounterRng& rng) {
  std::uint64_t k = 0;
  const auto kind = rng.below(k++, 3);
  if (kind == 0) {
    return oracle::GaussianLaw{detail::draw(rng, k, 50, 5000), detail::draw(rng, k, 5, 800)};
  }
  if (kind == 1) {
    const double lo = detail::draw(rng, k, 0, 2000);
    return oracle::UniformLaw{lo, lo + detail::draw(rng, k, 10, 3000)};
  }
  oracle::PiecewiseLinear p;
  const auto knots = 3 + rng.below(k++, 5);
  double y = detail::draw(rng, k, 0, 1000);
  for (std::size_t i = 0; i < knots; ++i) {
    p.xs.push_back(static_cast<double>(i) / static_cast<double>(knots - 1));
    p.ys.push_back(y);
    // one segment in four is flat
    if (rng.below(k++, 4) != 0) y += detail::draw(rng, k, 1, 2000);
  }
  return p;
}

/// Zero-violation universe with independent random laws for x and y.
inline oracle::CoupledUniverse random_comonotonic(const CounterRng& rng, std::size_t n) {
  return oracle::generate_comonotonic(n, random_law(rng.fork(1)), random_law(rng.fork(2)),
                                      rng.bits(3));
}

/// Coverage of the true matched differences by grid-method intervals.
/// Part 1: zero-violation universes with eps = 0. Part 2: universes with an
/// injected rank window and the true eps supplied (the precondition of the
/// violation bound); with `understate_epsilon` part 2 is fed eps = 0.
inline SuiteResult coverage_suite(const Options& opt, OrderingLedger& ledger) {
  detail::Stopwatch clock;
  constexpr std::array<double, 3> alphas{0.5, 0.8, 0.95};
  std::array<double, 3> worst{1.0, 1.0, 1.0};
  std::size_t failures = 0;
  const auto labels = QuantileLabels::hub_default();
  const CounterRng root(opt.seed ^ 0xC0FEu);

  auto check = [&](const oracle::CoupledUniverse& u, const ViolationParams& eps,
                   std::uint64_t seed) {
    const auto pair = oracle::quantize(u, labels);
    BoundConfig cfg{opt.n_samples, seed, BoundMethod::QuantileGrid, eps};
    const auto samples = sample_bounds_grid(pair, cfg);
    ledger.record(samples);
    const auto z = oracle::true_z(u);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const auto ci = extract_ci(samples, alphas[a]);
      const double cov = oracle::coverage_check(ci, z);
      worst[a] = std::min(worst[a], cov);
      if (cov < alphas[a] - 0.01 || ci.certificate < alphas[a]) ++failures;
    }
  };

  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto rng = root.fork(t);
    check(random_comonotonic(rng, opt.universe_n), ViolationParams::zero(), rng.bits(10));
  }
  const std::size_t violated_trials = std::max<std::size_t>(1, opt.trials / 5);
  for (std::size_t t = 0; t < violated_trials; ++t) {
    const auto rng = root.fork(1000 + t);
    // Even trials share one law (differences concentrate near zero, so a
    // scrambled matching is what spreads them); odd trials use two laws.
    const auto law = random_law(rng.fork(1));
    const auto base = t % 2 == 0
                          ? oracle::generate_comonotonic(opt.universe_n, law, law, rng.bits(3))
                          : random_comonotonic(rng, opt.universe_n);
    const auto window = static_cast<std::size_t>(
        (0.05 + 0.15 * rng.uniform(11)) * static_cast<double>(opt.universe_n));
    const auto u = oracle::inject_violation(base, window, rng.bits(12));
    const auto eps = opt.understate_epsilon ? ViolationParams::zero() : oracle::true_epsilon(u);
    check(u, eps, rng.bits(13));
  }

  std::ostringstream os;
  os << "universes=" << opt.trials << "+" << violated_trials << " min coverage:";
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    os << " a=" << alphas[a] << "->" << worst[a];
  }
  os << " failures=" << failures;
  return {"coverage", failures == 0, os.str(), clock.seconds()};
}

/// Zero-violation universes have equal-rank matching and eps = (0, 0); and
/// over arbitrary matchings, eps = (0, 0) exactly when ranks are equal.
inline SuiteResult lemma1_suite(const Options& opt) {
  detail::Stopwatch clock;
  const CounterRng root(opt.seed ^ 0x1E1u);
  std::size_t bad = 0;
  std::size_t zero_seen = 0;
  std::size_t nonzero_seen = 0;
  const std::size_t n = std::min<std::size_t>(opt.universe_n, 2000);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto rng = root.fork(t);
    const auto u = random_comonotonic(rng, n);
    const auto eps = oracle::true_epsilon(u);
    if (!u.equal_rank_matching() || eps.lower != 0.0 || eps.upper != 0.0) ++bad;

    // Perturbed matchings: windows (possibly 0) and sporadic swaps.
    auto v = oracle::inject_violation(u, rng.below(20, 4) == 0 ? 0 : rng.below(21, n / 10),
                                      rng.bits(22));
    if (rng.below(23, 3) == 0) v = oracle::swap_ranks(v, rng.below(24, n), rng.below(25, n));
    const auto ev = oracle::true_epsilon(v);
    const bool zero = ev.lower == 0.0 && ev.upper == 0.0;
    (zero ? zero_seen : nonzero_seen)++;
    if (!v.is_bijection() || zero != v.equal_rank_matching()) ++bad;
  }
  std::ostringstream os;
  os << "trials=" << opt.trials << " zero-eps perturbed=" << zero_seen
     << " nonzero-eps perturbed=" << nonzero_seen << " failures=" << bad;
  return {"lemma1", bad == 0, os.str(), clock.seconds()};
}

/// Pre-divergence violation universes: both scenarios follow the same law
/// and the matching is scrambled inside a rank window, giving a known true
/// eps in [0, 0.2]. Checks estimate >= true and approx <= estimate.
inline SuiteResult lemma2_suite(const Options& opt) {
  detail::Stopwatch clock;
  const CounterRng root(opt.seed ^ 0x1E2u);
  const auto labels = QuantileLabels::hub_default();
  std::size_t over_ok = 0;
  std::size_t order_ok = 0;
  double worst_shortfall = 0.0;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto rng = root.fork(t);
    const auto law = random_law(rng.fork(1));
    const auto base = oracle::generate_comonotonic(opt.universe_n, law, law, rng.bits(2));
    const auto window =
        static_cast<std::size_t>(0.2 * rng.uniform(3) * static_cast<double>(opt.universe_n));
    const auto u = oracle::inject_violation(base, window, rng.bits(4));
    const auto truth = oracle::true_epsilon(u);
    const std::array<ScenarioPair, 1> weeks{oracle::quantize(u, labels, PairMeta{"", "", "", 0, 1})};
    const auto est = estimate_epsilon(weeks).final;
    const auto approx = approx_epsilon(weeks);
    if (est.upper >= truth.upper && est.lower >= truth.lower) {
      ++over_ok;
    } else {
      worst_shortfall = std::max({worst_shortfall, truth.upper - est.upper,
                                  truth.lower - est.lower});
    }
    if (approx.upper <= est.upper && approx.lower <= est.lower) ++order_ok;
  }
  std::ostringstream os;
  os << "estimate>=true " << over_ok << "/" << opt.trials << " (worst shortfall "
     << worst_shortfall << "); approx<=estimate " << order_ok << "/" << opt.trials;
  return {"lemma2", over_ok == opt.trials && order_ok == opt.trials, os.str(), clock.seconds()};
}

/// z_lower <= z_upper for both methods over random universes and eps values.
inline SuiteResult ordering_suite(const Options& opt, OrderingLedger& ledger) {
  detail::Stopwatch clock;
  const CounterRng root(opt.seed ^ 0x0Du);
  const auto labels = QuantileLabels::hub_default();
  const std::size_t samples = std::min<std::size_t>(opt.n_samples, 20000);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto rng = root.fork(t);
    const auto pair = oracle::quantize(random_comonotonic(rng, 2000), labels);
    const ViolationParams eps(0.3 * rng.uniform(5), 0.3 * rng.uniform(6));
    for (const auto method : {BoundMethod::QuantileGrid, BoundMethod::Interpolated}) {
      ledger.record(sample_bounds(pair, {samples, rng.bits(7), method, eps}));
    }
  }
  std::ostringstream os;
  os << "draws=" << ledger.draws << " violations=" << ledger.violations;
  return {"ordering", ledger.violations == 0, os.str(), clock.seconds()};
}

/// The fixed Gaussian-difference universe used by the convergence suite.
inline oracle::CoupledUniverse convergence_universe(std::uint64_t seed, std::size_t n) {
  return oracle::generate_comonotonic(n, oracle::GaussianLaw{1000.0, 150.0},
                                      oracle::GaussianLaw{800.0, 100.0}, seed);
}

/// Mean width at eps = 0 strictly decreases over 11..201 labels and ends at
/// no more than 10% of the 11-label width; the interpolated method gives
/// z_upper == z_lower exactly.
inline SuiteResult convergence_suite(const Options& opt, OrderingLedger& ledger) {
  detail::Stopwatch clock;
  const auto u = convergence_universe(opt.seed ^ 0xC0u, opt.universe_n);
  constexpr std::array<std::size_t, 5> counts{11, 23, 51, 101, 201};
  auto make = [&](const QuantileLabels& labels) { return oracle::quantize(u, labels); };
  const BoundConfig cfg{opt.n_samples, opt.seed, BoundMethod::QuantileGrid, {}};
  const auto rows = width_convergence_probe(make, counts, cfg);

  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    decreasing = decreasing && rows[i].mean_width < rows[i - 1].mean_width;
  }
  const double ratio = rows.back().mean_width / rows.front().mean_width;

  std::size_t interp_nonzero = 0;
  for (const std::size_t count : counts) {
    const auto pair = make(QuantileLabels::uniform(count));
    const auto s = sample_bounds_interp(pair, {opt.n_samples, opt.seed, BoundMethod::Interpolated, {}});
    ledger.record(s);
    for (std::size_t k = 0; k < s.size(); ++k) interp_nonzero += s.z_upper[k] != s.z_lower[k];
  }

  std::ostringstream os;
  os << "widths:";
  for (const auto& r : rows) os << ' ' << r.label_count << "->" << r.mean_width;
  os << " ratio=" << ratio << " interp nonzero widths=" << interp_nonzero;
  return {"convergence", decreasing && ratio <= 0.10 && interp_nonzero == 0, os.str(),
          clock.seconds()};
}

/// Random strictly increasing abscissae with non-decreasing ordinates.
inline std::pair<std::vector<double>, std::vector<double>> random_monotone_knots(
    const CounterRng& rng) {
  std::uint64_t k = 0;
  const auto n = 2 + rng.below(k++, 30);
  std::vector<double> xs, ys;
  double x = detail::draw(rng, k, -100, 100);
  double y = detail::draw(rng, k, -1000, 1000);
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(x);
    ys.push_back(y);
    x += detail::draw(rng, k, 1e-3, 50) * (rng.below(k++, 5) == 0 ? 20.0 : 1.0);
    const auto r = rng.below(k++, 6);
    if (r == 0) continue;  // flat segment
    y += detail::draw(rng, k, 0, 100) * (r == 1 ? 1e3 : 1.0);
  }
  return {xs, ys};
}

/// Knot exactness (1e-12 relative), monotonicity over 10^4-point grids for
/// random monotone knot sets, and exact reproduction of linear data.
inline SuiteResult pchip_suite(const Options& opt) {
  detail::Stopwatch clock;
  const CounterRng root(opt.seed ^ 0x9C41u);
  constexpr std::size_t grid = 10000;
  double worst_knot = 0.0;
  double worst_drop = 0.0;
  double worst_linear = 0.0;
  for (std::size_t t = 0; t < std::max<std::size_t>(opt.trials, 100); ++t) {
    const auto rng = root.fork(t);
    auto [xs, ys] = random_monotone_knots(rng);
    const double range = std::max(1e-300, ys.back() - ys.front());
    const MonotoneInterpolant f(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double scale = std::max(std::abs(ys[i]), range);
      worst_knot = std::max(worst_knot, std::abs(f(xs[i]) - ys[i]) / scale);
    }
    double prev = f(xs.front());
    for (std::size_t g = 1; g <= grid; ++g) {
      const double x = xs.front() + (xs.back() - xs.front()) * static_cast<double>(g) / grid;
      const double v = f(x);
      worst_drop = std::max(worst_drop, (prev - v) / range);
      prev = v;
    }

    // same abscissae, collinear ordinates
    std::uint64_t k = 900;
    const double slope = detail::draw(rng, k, 0.01, 10);
    const double icpt = detail::draw(rng, k, -100, 100);
    std::vector<double> line;
    for (const double x : xs) line.push_back(icpt + slope * x);
    const MonotoneInterpolant lin(xs, line);
    const double lrange = std::max(1e-300, line.back() - line.front());
    for (std::size_t g = 0; g <= grid; ++g) {
      const double x = xs.front() + (xs.back() - xs.front()) * static_cast<double>(g) / grid;
      worst_linear = std::max(worst_linear, std::abs(lin(x) - (icpt + slope * x)) / lrange);
    }
  }
  std::ostringstream os;
  os << "knot err=" << worst_knot << " max drop=" << worst_drop << " linear err=" << worst_linear;
  return {"pchip", worst_knot <= 1e-12 && worst_drop <= 1e-12 && worst_linear <= 1e-10, os.str(),
          clock.seconds()};
}

/// For a fixed seed, widening eps by delta never shrinks the interval.
inline SuiteResult widening_suite(const Options& opt, OrderingLedger& ledger) {
  detail::Stopwatch clock;
  const CounterRng root(opt.seed ^ 0x3D3u);
  const auto labels = QuantileLabels::hub_default();
  constexpr std::array<double, 3> deltas{0.01, 0.05, 0.1};
  std::size_t checks = 0;
  std::size_t bad = 0;
  const std::size_t universes = std::min<std::size_t>(opt.trials, 20);
  for (std::size_t t = 0; t < universes; ++t) {
    const auto rng = root.fork(t);
    const auto pair = oracle::quantize(random_comonotonic(rng, opt.universe_n), labels);
    const double el = 0.1 * rng.uniform(1);
    const double eu = 0.1 * rng.uniform(2);
    for (const auto method : {BoundMethod::QuantileGrid, BoundMethod::Interpolated}) {
      const BoundConfig base{opt.n_samples, rng.bits(3), method, ViolationParams(el, eu)};
      const auto s0 = sample_bounds(pair, base);
      ledger.record(s0);
      const auto ci0 = extract_ci(s0, 0.8);
      for (const double d : deltas) {
        BoundConfig wide = base;
        wide.violation = ViolationParams(std::min(1.0, el + d), std::min(1.0, eu + d));
        const auto s1 = sample_bounds(pair, wide);
        ledger.record(s1);
        const auto ci1 = extract_ci(s1, 0.8);
        ++checks;
        if (!ci1.contains(ci0)) ++bad;
        for (std::size_t k = 0; k < s0.size(); ++k) {
          if (s1.z_upper[k] < s0.z_upper[k] || s1.z_lower[k] > s0.z_lower[k]) {
            ++bad;
            break;
          }
        }
      }
    }
  }
  std::ostringstream os;
  os << "universes=" << universes << " checks=" << checks << " failures=" << bad;
  return {"widening", bad == 0, os.str(), clock.seconds()};
}

/// The suites run by the `validate` command, in report order.
inline std::vector<SuiteResult> run_all(const Options& opt) {
  OrderingLedger ledger;
  std::vector<SuiteResult> out;
  out.push_back(coverage_suite(opt, ledger));
  out.push_back(lemma1_suite(opt));
  out.push_back(lemma2_suite(opt));
  out.push_back(convergence_suite(opt, ledger));
  out.push_back(pchip_suite(opt));
  out.push_back(widening_suite(opt, ledger));
  out.push_back(ordering_suite(opt, ledger));
  return out;
}

}  // namespace scenbound::validation
