#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qstab {

using AgentId = std::string;
using ContractId = std::string;

// Contract sets are bitmasks over a market's contract indices. Everything
// above this cap is refused at load time.
using Mask = std::uint64_t;
inline constexpr int kMaxContracts = 64;

// Malformed or out-of-contract input (unknown ids, schema errors, violated
// preconditions, size caps). CLI maps this to exit code 2.
class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A claimed property failed at runtime; the message carries the witness.
// CLI maps this to exit code 1.
class PropertyViolation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int bit_count(Mask m) { return std::popcount(m); }

// Index of the lowest set bit; m must be nonzero.
inline int lowest_bit_index(Mask m) { return std::countr_zero(m); }

inline Mask bit(int index) { return Mask{1} << index; }

template <typename Fn>
void for_each_bit(Mask m, Fn&& fn) {
  while (m) {
    fn(std::countr_zero(m));
    m &= m - 1;
  }
}

// Spreads the low bits of `compact` onto the set positions of `positions`,
// lowest position first. bit_count(positions) bits of `compact` are consumed.
inline Mask scatter_bits(Mask compact, Mask positions) {
  Mask out = 0;
  while (positions) {
    Mask p = positions & (~positions + 1);
    if (compact & 1) out |= p;
    compact >>= 1;
    positions &= positions - 1;
  }
  return out;
}

// Inverse of scatter_bits: packs the bits of `m` that lie on `positions`.
inline Mask gather_bits(Mask m, Mask positions) {
  Mask out = 0;
  int k = 0;
  while (positions) {
    Mask p = positions & (~positions + 1);
    if (m & p) out |= Mask{1} << k;
    ++k;
    positions &= positions - 1;
  }
  return out;
}

// Visits every submask of m, descending from m to 0 inclusive.
template <typename Fn>
void for_each_submask(Mask m, Fn&& fn) {
  Mask s = m;
  while (true) {
    fn(s);
    if (s == 0) break;
    s = (s - 1) & m;
  }
}

// splitmix64; the fixed PRNG for everything seeded (generation, random
// proposal strategies). State advances by the golden-gamma increment.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Independent deterministic stream for a (seed, label) pair. Labels keep
// draws for one entity insensitive to the presence of other entities.
inline SplitMix64 seeded_stream(std::uint64_t seed, std::string_view label) {
  return SplitMix64(seed ^ fnv1a64(label));
}

}  // namespace qstab
