#pragma once

#include <cstdint>
#include <random>

namespace advlb {

using Seed = std::uint64_t;

// splitmix64 finalizer; used to derive independent child streams from a
// parent seed and an index (image id, restart number, batch item).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr Seed derive_seed(Seed parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ (index + 0x632be59bd9b4e019ULL));
}

// mt19937_64 with distribution code spelled out, so streams are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace advlb
