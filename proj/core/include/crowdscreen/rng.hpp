#pragma once

#include <cstdint>

namespace crowdscreen {

// splitmix64 finalizer; used to spread seeds into independent substreams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// PCG32 (XSH RR 64/32). Deterministic across platforms; all simulation
// randomness goes through this so that a seed pins byte-identical output.
class Pcg32 {
 public:
  Pcg32() : Pcg32(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}

  Pcg32(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform in [0, bound). Modulo bias is < bound / 2^64, irrelevant here.
  std::uint64_t below(std::uint64_t bound) { return bound ? next_u64() % bound : 0; }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Generator for the substream identified by (seed, a, b, c), e.g.
// (run seed, replication, worker). Streams are independent of the order in
// which they are created, which keeps replications order-independent.
inline Pcg32 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ mix64(a));
  s = mix64(s ^ mix64(b ^ 0x632be59bd9b4e019ULL));
  s = mix64(s ^ mix64(c ^ 0xe220a8397b1dcdafULL));
  return Pcg32(s, mix64(s));
}

}  // namespace crowdscreen
