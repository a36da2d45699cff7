#include "loopgas/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace loopgas {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag, std::uint64_t replica) {
  return mix64(mix64(root ^ 0x243f6a8885a308d3ULL) + mix64(tag) + replica * 0x9e3779b97f4a7c15ULL);
}

double Rng::exponential(double rate) {
  // -log(1-u) with u in [0,1) keeps the argument strictly positive.
  return -std::log1p(-uniform01()) / rate;
}

double Rng::truncated_exponential(double bound) {
  // Inverse CDF of Exp(1) restricted to (0, bound].
  const double mass = -std::expm1(-bound);  // 1 - e^{-bound}
  double t = -std::log1p(-uniform01() * mass);
  return std::min(t, bound);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0)) throw std::invalid_argument("poisson: negative mean");
  std::uint64_t total = 0;
  // Split a large mean into chunks; the sum of the chunk draws is exact.
  while (mean > 16.0) {
    const double chunk = 12.0;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform01_open0();
    while (prod > limit) {
      ++total;
      prod *= uniform01_open0();
    }
  }
  const double limit = std::exp(-mean);
  double prod = uniform01_open0();
  while (prod > limit) {
    ++total;
    prod *= uniform01_open0();
  }
  return total;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x > limit);
  return x % n;
}

std::size_t Rng::pick_weighted(std::span<const double> weights) {
  double total = 0;
  for (double w : weights) total += w;
  if (!(total > 0)) throw std::invalid_argument("pick_weighted: nonpositive total");
  double u = uniform01() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0) return i;
  }
  return weights.size() - 1;
}

std::size_t Rng::pick_cumulative(std::span<const double> cumulative) {
  if (cumulative.empty()) throw std::invalid_argument("pick_cumulative: empty table");
  const double u = uniform01() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return std::size_t(it - cumulative.begin());
}

}  // namespace loopgas
