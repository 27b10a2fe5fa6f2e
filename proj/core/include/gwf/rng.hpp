#pragma once

#include <cstdint>
#include <limits>

#include "gwf/types.hpp"

// Counter-based randomness. Every draw is a pure function of a 64-bit seed
// and a 64-bit key, so results do not depend on traversal order or on how
// work is split between threads.
//
//   mix(z):  z ^= z >> 30; z *= 0xbf58476d1ce4e5b9;
//            z ^= z >> 27; z *= 0x94d049bb133111eb;
//            z ^= z >> 31
//
// (the SplitMix64 finalizer). Node keys hash the word symbol by symbol:
//   key(empty)  = mix(kGolden)
//   key(w s)    = mix(key(w) + (s + 1) * kGolden)
// and the uniform attached to a node is
//   bits(seed, key) = mix(key ^ mix(seed + kGolden)),  u = (bits >> 11) * 2^-53.
namespace gwf::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kRootKey = mix(kGolden);

constexpr std::uint64_t child_key(std::uint64_t parent_key, Symbol symbol) noexcept {
  return mix(parent_key + (static_cast<std::uint64_t>(symbol) + 1) * kGolden);
}

std::uint64_t word_key(const Word& word) noexcept;

constexpr std::uint64_t bits(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix(key ^ mix(seed + kGolden));
}

constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

constexpr double uniform(std::uint64_t seed, std::uint64_t key) noexcept {
  return to_unit(bits(seed, key));
}

// Independent sub-seed for stream `index` (trial, attempt, window, ...).
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix(mix(seed ^ 0x2545f4914f6cdd1dULL) + (index + 1) * kGolden);
}

// Sequential engine over a counter; satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  explicit CounterEngine(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return bits(seed_, counter_++); }
  double uniform() noexcept { return to_unit((*this)()); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace gwf::rng
