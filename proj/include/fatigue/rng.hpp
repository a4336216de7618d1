#pragma once

#include <cstdint>
#include <random>

namespace fatigue {

/// Seedable generator with a platform-independent output sequence.
/// std::mt19937_64 is fully specified by the standard; the standard
/// distributions are not, so the conversions here are written out.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (polar Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fatigue
