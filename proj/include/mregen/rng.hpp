#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mregen {

// Seedable random source. Every random choice in a run is drawn from a
// stream constructed here, so a run is reproducible from its master seed.
// Streams for independent tasks are derived with fork(key); the generator
// itself is never shared between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  // Uniform draw from the complex unit circle.
  std::complex<double> unit() {
    const double theta = 2.0 * 3.14159265358979323846 * uniform01();
    return {std::cos(theta), std::sin(theta)};
  }

  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
  }

  // Derived stream for (this seed, key); deterministic and decorrelated.
  Rng fork(std::uint64_t key) const { return Rng(mix(seed_, key)); }

 private:
  // splitmix64 finalizer over the combined words
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace mregen
