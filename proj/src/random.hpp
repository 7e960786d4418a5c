#pragma once

#include <cmath>
#include <numbers>
#include <random>

namespace bandgs {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike the standard distributions.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal deviate (Box-Muller, one value per call).
inline double normal01(std::mt19937_64& rng) {
  const double u = 1.0 - uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace bandgs
