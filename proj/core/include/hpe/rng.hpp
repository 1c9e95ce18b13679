#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hpe::rng {

// Counter-based Gaussian draws. Every normal is a pure function of
// (seed, stream, counter, k1, k2), so results do not depend on thread
// scheduling and a field sampled at cutoff m restricted to m' < m is
// bit-identical to the field sampled at m'.

enum class Stream : std::uint64_t {
  initial = 0x1,
  step = 0x2,
  step_second_half = 0x3,
  replica = 0x4,
  test = 0x5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, Stream stream, std::uint64_t counter,
                                 std::uint64_t lane) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ counter);
  return splitmix64(h ^ lane);
}

/// Uniform in (0, 1], 53-bit resolution.
constexpr double to_unit_open0(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

inline double normal(std::uint64_t seed, Stream stream, std::uint64_t counter, int k1, int k2) {
  const std::uint64_t lane =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k1)) << 32) |
      static_cast<std::uint32_t>(k2);
  const std::uint64_t h = hash_key(seed, stream, counter, lane);
  const double u1 = to_unit_open0(splitmix64(h ^ 0x3c6ef372fe94f82bULL));
  const double u2 = to_unit_open0(splitmix64(h ^ 0xa54ff53a5f1d36f1ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Per-replica seed derived from the master seed.
constexpr std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica) {
  return hash_key(master_seed, Stream::replica, replica, 0);
}

}  // namespace hpe::rng
