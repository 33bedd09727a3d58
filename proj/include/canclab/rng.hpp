#pragma once

#include <cstdint>

namespace canclab {

// SplitMix64 run in counter mode: output(i) = finalize(key + (i+1)*GAMMA).
// Stateless in the counter, so draws are order-independent and a (seed, stream)
// pair always yields the same value at the same index, no matter how many
// threads consume the stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed) ^ (stream * 0xDA942042E4DD58B5ULL + 0x2545F4914F6CDD1DULL))) {}

  std::uint64_t bits(std::uint64_t index) const {
    return mix(key_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on [0, 1), 53 random bits.
  double uniform01(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t key_;
};

// Child seed for composite generators (sum components, product processes).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  return CounterRng(seed, 0xC0FFEE ^ index).bits(index);
}

}  // namespace canclab
