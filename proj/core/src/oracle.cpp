#include "loopgas/oracle.hpp"

#include <stdexcept>

namespace loopgas {

namespace {

// Flat pairwise-compatibility matrix over catalog entries.
std::vector<std::uint8_t> compatibility_matrix(const WeightedCatalog& support) {
  const auto& entries = support.entries();
  const std::size_t n = entries.size();
  std::vector<std::uint8_t> ok(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool compatible = !contours_incompatible(entries[i].contour, entries[j].contour);
      ok[i * n + j] = ok[j * n + i] = compatible;
    }
  return ok;
}

struct Search {
  const WeightedCatalog& support;
  std::vector<std::uint8_t> ok;
  std::uint64_t max_nodes;
  std::uint64_t nodes = 0;
  Configuration current;
  std::vector<Configuration>* configs = nullptr;
  std::vector<double>* weights = nullptr;

  void emit() {
    if (++nodes > max_nodes)
      throw std::runtime_error("configuration space too large for exhaustive enumeration");
    if (configs) configs->push_back(current);
    if (weights) {
      double w = 1.0;
      for (std::uint32_t i : current) w *= support.entries()[i].weight;
      weights->push_back(w);
    }
  }

  void grow(std::uint32_t from) {
    emit();
    const std::size_t n = support.entries().size();
    for (std::uint32_t j = from; j < n; ++j) {
      bool fits = true;
      for (std::uint32_t i : current)
        if (!ok[std::size_t(i) * n + j]) {
          fits = false;
          break;
        }
      if (!fits) continue;
      current.push_back(j);
      grow(j + 1);
      current.pop_back();
    }
  }
};

}  // namespace

std::vector<Configuration> enumerate_x(const WeightedCatalog& support, std::uint64_t max_nodes) {
  std::vector<Configuration> out;
  Search search{support, compatibility_matrix(support), max_nodes};
  search.configs = &out;
  search.grow(0);
  return out;
}

std::vector<Configuration> enumerate_x(const Box& volume, int n_max, std::uint64_t max_nodes) {
  // The subsets do not depend on the temperature, so any beta builds the
  // same support.
  return enumerate_x(build_catalog_inside(1.0, n_max, volume), max_nodes);
}

ExactMeasure measure_from(WeightedCatalog support, std::uint64_t max_nodes) {
  ExactMeasure m{support.beta(), std::nullopt, std::move(support), {}, {}, 0.0};
  Search search{m.support, compatibility_matrix(m.support), max_nodes};
  search.configs = &m.configurations;
  search.weights = &m.probabilities;
  search.grow(0);
  for (double w : m.probabilities) m.partition_function += w;
  for (double& w : m.probabilities) w /= m.partition_function;
  return m;
}

ExactMeasure measure(const Box& volume, double beta, int n_max, std::uint64_t max_nodes) {
  ExactMeasure m = measure_from(build_catalog_inside(beta, n_max, volume), max_nodes);
  m.volume = volume;
  return m;
}

double expectation(const ExactMeasure& m,
                   const std::function<double(const Configuration&)>& observable) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.configurations.size(); ++i)
    sum += m.probabilities[i] * observable(m.configurations[i]);
  return sum;
}

}  // namespace loopgas
