#pragma once

// Reproducible random streams. Replication k of a run seeded with `base`
// uses an mt19937_64 engine seeded with the (k+1)-th output of SplitMix64
// started at `base`; uniforms take the top 53 engine bits and exponentials
// are drawn by inversion. Every step is pinned by the C++ standard or this
// file, so results are bit-identical across builds and platforms.

#include <cstdint>
#include <limits>
#include <random>

namespace agevac {

inline std::uint64_t splitmix64_at(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t replication_index) {
  return splitmix64_at(base, replication_index);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate; rate 0 yields +infinity (event never fires).
  double exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform()) / rate;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace agevac
