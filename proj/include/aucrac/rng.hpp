#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aucrac {

/// Deterministic random stream.
///
/// Engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so every
/// derived draw (uniform doubles, bounded integers, exponentials) is computed
/// here from raw 64-bit outputs to keep streams identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). Rejection sampling, so unbiased. n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Exponential with the given rate (> 0).
  double exponential(double rate);

  /// Child stream for an independent purpose; the child seed is a splitmix64
  /// finalisation of (seed, tag), so it does not consume from this stream.
  Rng fork(std::string_view tag) const;

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

}  // namespace aucrac
