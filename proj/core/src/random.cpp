#include "sdt/random.hpp"

#include "sdt/error.hpp"

namespace sdt {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index needs n > 0");
  // Largest multiple of n that fits; values at or above it are rejected.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  while (true) {
    const std::uint64_t v = engine_();
    if (v < limit) return v % n;
  }
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw InvalidArgument("uniform_int needs lo <= hi");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  return lo + static_cast<std::int64_t>(uniform_index(span));
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

SeedStreams derive_seeds(std::uint64_t master) {
  return {splitmix64(master * 4 + 1), splitmix64(master * 4 + 2), splitmix64(master * 4 + 3)};
}

}  // namespace sdt
