#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive statistically independent child
/// seeds from a parent seed and a stream counter.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  return splitmix64(splitmix64(parent) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  for (auto s : path) parent = derive_seed(parent, s);
  return parent;
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace fim
