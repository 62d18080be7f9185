#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace drbench {

// SplitMix64 finalizer; also used to expand a 64-bit seed into generator state.
std::uint64_t splitmix64_next(std::uint64_t& state);

// FNV-1a over a byte string. Used to derive per-cell seeds from text tags.
std::uint64_t fnv1a64(std::string_view s);

// Stable seed derivation: mixes a master seed with a textual tag so that
// adding a cell to an experiment never shifts the randomness of other cells.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

// xoshiro256** by Blackman & Vigna (public domain). Pinned here so that every
// seeded result is reproducible across platforms and standard-library
// versions; std:: distributions are deliberately not used anywhere.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();

  // Uniform double in [0, 1), 53 bits.
  double next_double();

  // Uniform integer in [0, n), unbiased (bitmask rejection). n must be > 0.
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via Box-Muller on the pinned uniform stream.
  // Draws two uniforms per pair of deviates, caches the second.
  double next_gaussian();

  // Fisher-Yates shuffle, last-to-first, pinned order.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace drbench
