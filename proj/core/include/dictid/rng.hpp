#pragma once

#include <cmath>
#include <cstdint>

namespace dictid {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from (seed, stream index). Used for
/// per-trial / per-direction streams so that parallel evaluation matches
/// serial evaluation bit for bit.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + detail::kGolden));
}

/// Counter-based deterministic generator (see kRngAlgorithm in version.hpp).
/// Stateless: output i is a pure function of (seed, i), so any consumer may
/// read any counter in any order, from any thread.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t at(std::uint64_t i) const {
    return mix64(seed_ + (i + 1) * detail::kGolden);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01(std::uint64_t i) const {
    return static_cast<double>(at(i) >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos(std::uint64_t i) const {
    return static_cast<double>((at(i) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard Gaussian from counters (2i, 2i+1), Box-Muller cosine branch.
  double gaussian(std::uint64_t i) const {
    const double u1 = uniform_pos(2 * i);
    const double u2 = uniform01(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace dictid
