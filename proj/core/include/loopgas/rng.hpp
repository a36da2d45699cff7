#pragma once

// Reproducible randomness.  mt19937_64 is fully pinned by the standard, and all
// variates are derived from it with hand-written transforms below, because the
// std::*_distribution classes are implementation-defined and would break
// byte-identical reruns across library versions.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace loopgas {

// splitmix64 step; used to mix seeds, never to generate variates.
std::uint64_t mix64(std::uint64_t z);

// Stable sub-seed for (experiment tag, replica index) under one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag, std::uint64_t replica = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log argument.
  double uniform01_open0() { return double((gen_() >> 11) + 1) * 0x1.0p-53; }

  // Exp(rate) via inversion.
  double exponential(double rate = 1.0);

  // Exp(1) conditioned on the value lying in (0, bound].
  double truncated_exponential(double bound);

  // Exact Poisson(mean).  Knuth multiplication in chunks so the running product
  // never underflows, valid for any mean >= 0.
  std::uint64_t poisson(double mean);

  // Uniform over {0, ..., n-1} by rejection, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  // Index i with probability weights[i] / sum(weights).  Weights need not be
  // normalised; at least one must be positive.
  std::size_t pick_weighted(std::span<const double> weights);

  // Index via a precomputed inclusive prefix-sum table (binary search).
  std::size_t pick_cumulative(std::span<const double> cumulative);

 private:
  std::mt19937_64 gen_;
};

}  // namespace loopgas
