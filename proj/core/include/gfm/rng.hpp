#pragma once

#include <cstdint>
#include <random>

namespace gfm {

// Caller-owned RNG; never shared between threads.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() { return uni_(gen_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return norm_(gen_); }
  uint64_t integer(uint64_t n) {  // in [0, n)
    return std::uniform_int_distribution<uint64_t>(0, n - 1)(gen_);
  }
  std::mt19937_64& engine() { return gen_; }

  // Decorrelated stream for a named sub-purpose (split seeds, eval, ...).
  static uint64_t derive(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace gfm
