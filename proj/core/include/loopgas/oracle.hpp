#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "loopgas/catalog.hpp"
#include "loopgas/region.hpp"

namespace loopgas {

// A compatible set of contours, stored as ascending indices into the entry
// list of the catalog it was enumerated from.
using Configuration = std::vector<std::uint32_t>;

inline constexpr std::uint64_t kDefaultNodeGuard = std::uint64_t(1) << 25;

// Every pairwise-compatible subset of the catalog's support, in depth-first
// order (so lexicographic in the index lists, starting from the empty set).
// The search counts one node per emitted configuration; exceeding the guard
// aborts with an error, since the full list would not fit in memory anyway.
std::vector<Configuration> enumerate_x(const WeightedCatalog& support,
                                       std::uint64_t max_nodes = kDefaultNodeGuard);
// Same, over all contours lying inside the volume.
std::vector<Configuration> enumerate_x(const Box& volume, int n_max,
                                       std::uint64_t max_nodes = kDefaultNodeGuard);

// The exact finite-volume distribution: every configuration with its
// normalized weight exp(-beta * total size) / Z.
struct ExactMeasure {
  double beta = 0.0;
  std::optional<Box> volume;  // absent for explicit-support rigs
  WeightedCatalog support;
  std::vector<Configuration> configurations;
  std::vector<double> probabilities;
  double partition_function = 0.0;

  const Contour& contour_at(std::uint32_t index) const {
    return support.entries()[index].contour;
  }
};

ExactMeasure measure(const Box& volume, double beta, int n_max,
                     std::uint64_t max_nodes = kDefaultNodeGuard);
ExactMeasure measure_from(WeightedCatalog support,
                          std::uint64_t max_nodes = kDefaultNodeGuard);

// Exact expectation of an observable given per configuration.
double expectation(const ExactMeasure& m,
                   const std::function<double(const Configuration&)>& observable);

}  // namespace loopgas
