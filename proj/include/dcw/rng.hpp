#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dcw {

// The engine is part of the reproducibility contract: mt19937_64 has a
// standardized output sequence, so identical seeds give identical streams on
// every platform. Distribution adapters from <random> are implementation
// defined and must not be used; draw through the helpers below instead.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic seed-splitting rule. A child stream is identified by
/// (master_seed, replica_index, stream_id); the rule is fixed and documented
/// so experiment outputs are reproducible across versions.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t replica,
                                std::uint64_t stream) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ replica);
  s = mix64(s ^ stream);
  return s;
}

/// Uniform integer in [0, n) by rejection, portable across platforms.
inline std::uint64_t uniform_below(Rng& g, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

/// Fisher-Yates shuffle with an explicit algorithm (std::shuffle draws in an
/// implementation-defined way and would break cross-platform determinism).
template <class T>
void portable_shuffle(std::vector<T>& v, Rng& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace dcw
