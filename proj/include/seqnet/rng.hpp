#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace seqnet {

// SplitMix64 finalizer. Used only for seed derivation, never as a stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the i-th child stream of `base`:
///   derive_seed(base, i) = splitmix64(base ^ splitmix64(i)).
/// Children of the same base are pairwise distinct for i < 2^64, and the
/// rule can be applied recursively (per-N seeds, then per-replica seeds).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(base ^ splitmix64(index));
}

/// Random stream backed by std::mt19937_64, whose output sequence is fixed
/// by the standard. The conversions to doubles are done here rather than by
/// <random> distributions, which are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate (> 0).
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace seqnet
