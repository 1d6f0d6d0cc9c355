#pragma once

#include <cstdint>

namespace flock {

// Counter-based 64-bit generator (splitmix64). Streams are derived by
// hashing a master seed together with stream indices, so parallel trials
// are reproducible regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Mixes a master seed with stream indices into an independent stream seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
  Rng r(master ^ (a * 0xd1342543de82ef95ULL) ^ (b * 0xaf251af3b0f025b5ULL) ^
        (c * 0x9e6c63d0876a9c17ULL));
  r.next_u64();
  return r.next_u64();
}

}  // namespace flock
