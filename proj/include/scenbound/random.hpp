#pragma once

#include <cstdint>
#include <string_view>

namespace scenbound {

/// Counter-based uniform stream: draw k for a given seed is a pure
/// function of (seed, k), so results do not depend on how the index range
/// is split across workers. The mixer is the SplitMix64 finalizer.
class CounterRng {
 public:
  static constexpr std::string_view name = "splitmix64-counter-v1";

  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint64_t bits(std::uint64_t index) const noexcept {
    std::uint64_t z = seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  constexpr double uniform(std::uint64_t index) const noexcept {
    return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound); bound must be positive.
  constexpr std::uint64_t below(std::uint64_t index, std::uint64_t bound) const noexcept {
    // Multiply-shift reduction; bias is below 2^-64 * bound.
    const unsigned __int128 wide = static_cast<unsigned __int128>(bits(index)) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  /// Independent child stream, e.g. one per universe or per week.
  constexpr CounterRng fork(std::uint64_t stream) const noexcept {
    return CounterRng(bits(~stream) ^ (stream * 0xD1B54A32D192ED03ULL));
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace scenbound
