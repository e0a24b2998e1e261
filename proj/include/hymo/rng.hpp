#pragma once

#include <cstdint>

namespace hymo {

// Deterministic 64-bit generator (splitmix64). Every randomized stage of the
// pipeline draws from one of these so results are reproducible across
// platforms and standard-library versions, which <random> distributions do
// not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n must be nonzero.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double next_uniform(double lo, double hi) { return lo + next_unit() * (hi - lo); }

  // Derives an independent stream; used to split one user seed into
  // per-purpose streams (init, shuffle, dropout, sampling).
  Rng fork(std::uint64_t stream_tag) {
    return Rng(next_u64() ^ (stream_tag * 0xd1342543de82ef95ULL));
  }

 private:
  std::uint64_t state_;
};

}  // namespace hymo
