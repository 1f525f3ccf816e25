#pragma once

#include <cstdint>
#include <span>

namespace qecml {

// Splittable counter-based RNG. Every stochastic quantity in the library is
// drawn from a stream derived as hash(master_seed, tag, index...), so shot s
// of evaluation e produces the same draws no matter which thread runs it or
// in which order.
struct Rng {
  uint64_t s[4];

  explicit Rng(uint64_t seed) { reseed(seed); }
  Rng(uint64_t seed, uint64_t stream) { reseed(derive(seed, stream)); }

  void reseed(uint64_t seed);

  // splitmix64 step; also used standalone for seed derivation.
  static uint64_t mix(uint64_t x);

  // Deterministic stream derivation: order of the arguments matters.
  static uint64_t derive(uint64_t seed, uint64_t a);
  static uint64_t derive(uint64_t seed, uint64_t a, uint64_t b);
  static uint64_t derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c);

  uint64_t next_u64();                 // xoshiro256**
  double uniform();                    // [0, 1)
  double uniform(double lo, double hi);
  uint64_t uniform_below(uint64_t bound);  // [0, bound), unbiased
  bool bernoulli(double p);
  double normal();                     // standard normal, Box-Muller
  // Inversion sampler; cost O(result). Fine for n*p up to a few dozen.
  uint64_t binomial(uint64_t n, double p);
  // Index into a cumulative weight table (strictly increasing, last = total).
  size_t categorical_from_cdf(std::span<const double> cdf);
};

}  // namespace qecml
