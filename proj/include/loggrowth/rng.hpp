#pragma once

#include <cstdint>
#include <random>

namespace loggrowth {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for a labelled branch. Distinct (parent, tag) pairs give
/// unrelated streams, which is how sample-split phases stay independent.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return mix_seed(mix_seed(parent) ^ (tag * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag, std::uint64_t index) {
  return derive_seed(derive_seed(parent, tag), index);
}

/// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace loggrowth
