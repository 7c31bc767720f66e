#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace twistlab {

// splitmix64, used to derive independent streams from (seed, stream) so that
// restart r of a search never shares state with restart r+1.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t s = seed ^ (0x6a09e667f3bcc909ull + stream * 0x100000001b3ull);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<unsigned>(a), static_cast<unsigned>(a >> 32),
                    static_cast<unsigned>(b), static_cast<unsigned>(b >> 32)};
  return std::mt19937_64(seq);
}

// Uniform in [0, 1).  Hand-rolled from raw bits because std::uniform_real_
// distribution is not bit-reproducible across standard library versions.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [lo, hi], inclusive.  Same reproducibility rationale.
inline long uniform_int(std::mt19937_64& rng, long lo, long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(rng() % span);
}

// Signed dyadic value m / 2^denom_pow with 1 <= m <= max_num, never zero.
inline double dyadic_value(std::mt19937_64& rng, long max_num, int denom_pow) {
  long m = uniform_int(rng, 1, max_num);
  double sign = (rng() & 1) ? 1.0 : -1.0;
  return sign * std::ldexp(static_cast<double>(m), -denom_pow);
}

}  // namespace twistlab
