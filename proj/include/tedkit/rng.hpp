#pragma once

#include <cstdint>
#include <random>

namespace tedkit {

// Splitmix64 step, used to spread user seeds and to derive independent
// per-worker streams (seed, counter) -> sub-seed. Keeps parallel training
// deterministic regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t counter) {
  // hash-then-offset; xor/add of two hashes would collide on swapped pairs
  return splitmix64(splitmix64(master) + counter);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

}  // namespace tedkit
