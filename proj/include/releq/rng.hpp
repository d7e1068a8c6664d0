#pragma once

#include <cstdint>
#include <random>

namespace releq {

/// Identifier recorded in outputs so runs can be reproduced bit for bit.
inline constexpr const char *kRngAlgorithm = "mt19937_64; uniform01 = (x >> 11) * 2^-53";

/// Seedable 64-bit generator. Uniform variates are formed from the top 53 bits
/// directly rather than through std::uniform_real_distribution, whose output
/// is implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
  std::mt19937_64 engine_;
};

} // namespace releq
