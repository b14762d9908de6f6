#pragma once

// Portable pseudo-random numbers. The standard distributions are not used
// because their output differs between library implementations.

#include <cstdint>
#include <random>

namespace sdt {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n) by rejection sampling; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::mt19937_64 engine_;
};

/// Independent streams derived from one master seed by fixed offsets.
struct SeedStreams {
  std::uint64_t sampling;
  std::uint64_t splitting;
  std::uint64_t shuffling;
};

SeedStreams derive_seeds(std::uint64_t master);

}  // namespace sdt
