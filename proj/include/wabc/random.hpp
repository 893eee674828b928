#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace wabc {

// Deterministic stream of draws keyed by (seed, substream id path).  Substreams
// are derived from the parent's key, not its engine state, so the draw sequence
// of a stream never depends on how sibling streams were consumed.  This is what
// makes particle-level parallelism reproducible at any worker count.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Derived stream for (purpose, step, particle, ...) tuples.
  RandomStream substream(std::initializer_list<std::uint64_t> ids) const;
  RandomStream substream(const std::vector<std::uint64_t>& ids) const;

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform on {0, 1, ..., n-1}; n >= 1.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard Normal (Marsaglia polar, second deviate cached).
  double normal();
  // Exponential with given rate (> 0).
  double exponential(double rate);
  // Gamma with given shape and rate (> 0); Marsaglia-Tsang.
  double gamma(double shape, double rate);
  // Poisson with given mean (>= 0).  Product method below 30, PTRS above.
  long poisson(double mean);

  std::uint64_t raw();  // full 64-bit word, mostly for tests

 private:
  RandomStream(std::uint64_t key, bool derived);

  std::uint64_t key_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Quantile of the standard Normal distribution for p in (0, 1).
// Rational initial guess polished by Halley steps on erfc; accurate to
// ~2 ulp over (1e-300, 1 - 1e-16).
double normal_quantile(double p);

// Standard Normal CDF.
double normal_cdf(double x);

}  // namespace wabc
