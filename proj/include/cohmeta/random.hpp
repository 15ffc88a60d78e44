#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cohmeta {

using Engine = std::mt19937_64;

/// Derives an independent seed from a base seed, a component label and an
/// index (splitmix64 over FNV-1a of the label). All randomness in the toolkit
/// flows from one user seed through this function.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index = 0);

inline Engine make_engine(std::uint64_t base, std::string_view label, std::uint64_t index = 0) {
  return Engine{derive_seed(base, label, index)};
}

/// Uniform draw in the open interval (0, 1), from the top 53 bits.
inline double open_unit(Engine& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform draw in [0, 1).
inline double unit(Engine& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

}  // namespace cohmeta
