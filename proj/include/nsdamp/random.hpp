#pragma once

#include <cstdint>
#include <random>

namespace nsdamp {

/// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
/// Unlike std::uniform_real_distribution this is the same on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace nsdamp
