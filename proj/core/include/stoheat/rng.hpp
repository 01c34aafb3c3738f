#pragma once

#include <cstdint>

namespace stoheat {

// 64-bit finalizer from SplitMix64 (Steele, Lea, Flood; Vigna's constants).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-addressable Gaussian stream keyed by (seed, sample_index).
//
// The stream key is a SplitMix64-style hash of the pair; uniform draw k is
// mix64(key + (k+1)*gamma) mapped to (0,1], and standard normals come from
// Box-Muller pairs, so any entry can be regenerated from its flat counter
// alone. Distinct sample indices give unrelated keys, which makes parallel
// sample execution order-independent. The construction below is part of the
// library's stability contract: changing any constant changes every stream.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t sample_index)
      : key_(mix64(mix64(seed + kGamma) ^ (kGamma * (sample_index + 1)))) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t bits(std::uint64_t counter) const { return mix64(key_ + (counter + 1) * kGamma); }

  // Uniform on (0,1]: 53 significant bits, never exactly zero.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal at counter k. Counters 2j and 2j+1 share one Box-Muller
  // pair (cosine and sine branch) built from uniforms at counters 2j, 2j+1.
  double normal(std::uint64_t counter) const;

  // Both normals of pair j at once (values at counters 2j and 2j+1).
  void normal_pair(std::uint64_t pair_index, double& even, double& odd) const;

 private:
  std::uint64_t key_;
};

}  // namespace stoheat
