/**
 * @file rng.hpp
 * @brief Seeded, implementation-independent scalar samplers. std::mt19937_64
 *        is pinned by the standard; the distributions here avoid the
 *        library-defined ones so streams are reproducible everywhere.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gsparse {

/// Uniform double in [0, 1) from the top 53 bits of the generator.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

/// Standard normal via Box-Muller (cosine branch only).
inline double gaussian(std::mt19937_64& gen) {
  const double u1 = 1.0 - uniform01(gen);  // (0, 1]
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gsparse
