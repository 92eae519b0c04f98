#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace engage::rng {

// splitmix64; the sampling/shuffling contract requires the byte-identical
// sequence across platforms, which std::shuffle does not guarantee.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, n) via rejection sampling.
  uint64_t bounded(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  uint64_t state_;
};

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.bounded(i));
    std::swap(v[i - 1], v[j]);
  }
}

// First k indices of a seeded partial Fisher-Yates over [0, n): a uniform
// sample without replacement, in draw order.
std::vector<size_t> sample_indices(size_t n, size_t k, SplitMix64& rng);

}  // namespace engage::rng
