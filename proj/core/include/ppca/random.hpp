#pragma once

#include <random>

namespace ppca {

/// Uniform double in [0, 1) built from the top 53 bits of the generator's
/// raw output, so streams are identical across standard libraries.
inline double uniform_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(gen);
}

}  // namespace ppca
