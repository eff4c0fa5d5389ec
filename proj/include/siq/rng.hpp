#pragma once

#include <cmath>
#include <cstdint>

namespace siq {

/// Deterministic 64-bit stream built on the SplitMix64 finalizer.
///
/// Substreams are derived from (master seed, stream index) by a
/// counter-style keyed mix, so replicate i always sees the same stream
/// regardless of how work is split across threads. All floating-point
/// draws consume a fixed number of 64-bit words, which keeps replay
/// bit-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  /// Stream for replicate `index` under `master_seed`.
  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    const std::uint64_t key = mix(master_seed + kGamma);
    return Rng(mix(key ^ mix(index * kGamma + kStreamSalt)));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform on the open interval (0, 1); 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// Uniform on (-pi/2, pi/2).
  double uniform_angle() { return kPi * (uniform() - 0.5); }

  /// Standard exponential.
  double exponential() { return -std::log(uniform()); }

  /// Standard normal via Box-Muller; consumes exactly two words.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ull;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace siq
