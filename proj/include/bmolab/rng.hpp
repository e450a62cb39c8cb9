#pragma once

#include <cstdint>

namespace bmo {

/// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
/// needed so artifacts are byte-identical across platforms for a given seed.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

/// Stateless hash of a cube identity, mixed with a user seed; drives the
/// per-Whitney-cube random step function.
inline uint64_t hash_cube_id(uint64_t seed, int32_t level, int64_t ix, int64_t iy) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(level + 1)));
  g.state ^= g.next() + static_cast<uint64_t>(ix) * 0xc2b2ae3d27d4eb4fULL;
  g.state ^= g.next() + static_cast<uint64_t>(iy) * 0x165667b19e3779f9ULL;
  return g.next();
}

}  // namespace bmo
