#pragma once

#include <cstdint>

namespace nrstream {

// splitmix64: tiny, fast, and deterministic across platforms. Every piece of
// run randomness (decoder curves, permutations, trial seeds) flows through
// this engine so a written-down seed reproduces a run bit-for-bit.
struct Rng {
  std::uint64_t state = 0;

  explicit Rng(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound); bound > 0. Plain modulo — at our bounds (<= 2^16)
  // the bias is ~2^-48 and determinism matters more than the last ulp.
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }
};

// Stateless counter hash (same finalizer as splitmix64). Used where a pure
// function of (seed, index) is needed, e.g. lazy corruption patterns that
// must answer "is bit p flipped?" in O(1) without enumerating the stream.
inline std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace nrstream
