#include "qecml/rng.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qecml {

uint64_t Rng::mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t Rng::derive(uint64_t seed, uint64_t a) { return mix(seed ^ mix(a)); }
uint64_t Rng::derive(uint64_t seed, uint64_t a, uint64_t b) {
  return mix(derive(seed, a) ^ mix(b));
}
uint64_t Rng::derive(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  return mix(derive(seed, a, b) ^ mix(c));
}

void Rng::reseed(uint64_t seed) {
  uint64_t x = seed;
  for (auto& word : s) {
    x = mix(x);
    word = x;
  }
  // xoshiro must not start from the all-zero state.
  if ((s[0] | s[1] | s[2] | s[3]) == 0) s[0] = 1;
}

static inline uint64_t rotl(uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s[1] * 5, 7) * 9;
  const uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

uint64_t Rng::uniform_below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

bool Rng::bernoulli(double p) { return uniform() < p; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Rng::binomial(uint64_t n, double p) {
  if (p <= 0.0 || n == 0) return 0;
  if (p >= 1.0) return n;
  // Inversion on the CDF; expected cost is O(n*p) which stays small for the
  // injection rates this library works with.
  const double q = 1.0 - p;
  const double ratio = p / q;
  double pmf = std::pow(q, static_cast<double>(n));
  if (pmf == 0.0) {
    // Far tail (huge n); fall back to a normal approximation, clamped.
    const double mean = static_cast<double>(n) * p;
    const double sd = std::sqrt(mean * q);
    const double draw = std::round(mean + sd * normal());
    if (draw < 0) return 0;
    if (draw > static_cast<double>(n)) return n;
    return static_cast<uint64_t>(draw);
  }
  double cdf = pmf;
  const double u = uniform();
  uint64_t k = 0;
  while (u > cdf && k < n) {
    ++k;
    pmf *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

size_t Rng::categorical_from_cdf(std::span<const double> cdf) {
  if (cdf.empty()) throw std::invalid_argument("categorical_from_cdf: empty table");
  const double u = uniform() * cdf.back();
  size_t lo = 0, hi = cdf.size() - 1;
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (cdf[mid] <= u)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace qecml
