#include "loopgas/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace loopgas {
namespace {

Contour unit_square(int cx, int cy) {
  return Contour({{cx, cy, 0}, {cx, cy + 1, 0}, {cx, cy, 1}, {cx + 1, cy, 1}});
}

TEST(EnumerateX, SmallVolumesByHand) {
  // One cell: empty set and the single square.
  const auto one = enumerate_x(Box::square(1), 4);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_TRUE(one[0].empty());
  EXPECT_EQ(one[1], Configuration{0});

  // Two adjacent cells: the squares touch, so never together.
  EXPECT_EQ(enumerate_x(Box{0, 0, 2, 1}, 4).size(), 3u);

  // Four cells in a row: independent sets of the path on 4 vertices.
  const auto path = enumerate_x(Box{0, 0, 4, 1}, 4);
  EXPECT_EQ(path.size(), 8u);
  int pairs = 0;
  for (const auto& cfg : path) pairs += cfg.size() == 2;
  EXPECT_EQ(pairs, 3);  // {0,2}, {0,3}, {1,3}
}

TEST(EnumerateX, BoxAndCatalogRoutesAgree) {
  const auto via_box = enumerate_x(Box::square(3), 6);
  const auto via_catalog = enumerate_x(build_catalog_inside(2.5, 6, Box::square(3)));
  EXPECT_EQ(via_box, via_catalog);
}

TEST(Measure, OneSquareVolume) {
  const auto m = measure(Box::square(1), 2.0, 4);
  ASSERT_EQ(m.configurations.size(), 2u);
  EXPECT_NEAR(m.partition_function, 1.0 + std::exp(-8.0), 1e-16);
  EXPECT_NEAR(m.probabilities[0], 1.0 / (1.0 + std::exp(-8.0)), 1e-16);
  EXPECT_NEAR(m.probabilities[0] + m.probabilities[1], 1.0, 1e-15);
  EXPECT_EQ(m.contour_at(0), unit_square(0, 0));
  ASSERT_TRUE(m.volume.has_value());

  const double p_empty =
      expectation(m, [](const Configuration& c) { return c.empty() ? 1.0 : 0.0; });
  EXPECT_NEAR(p_empty, 1.0 / (1.0 + std::exp(-8.0)), 1e-16);
  EXPECT_NEAR(expectation(m, [](const Configuration&) { return 1.0; }), 1.0, 1e-15);
}

TEST(Measure, FarIslandsFactorize) {
  // Volume made of two distant one-cell islands: the measure is a product,
  // so the square indicators are exactly uncorrelated.
  const auto support =
      build_catalog_explicit(2.0, 4, {unit_square(0, 0), unit_square(10, 10)});
  const auto m = measure_from(support);
  ASSERT_EQ(m.configurations.size(), 4u);
  EXPECT_FALSE(m.volume.has_value());

  const auto has = [&](std::uint32_t idx) {
    return [idx](const Configuration& c) {
      return std::binary_search(c.begin(), c.end(), idx) ? 1.0 : 0.0;
    };
  };
  const double pa = expectation(m, has(0));
  const double pb = expectation(m, has(1));
  const double pab = expectation(m, [&](const Configuration& c) {
    return c.size() == 2 ? 1.0 : 0.0;
  });
  EXPECT_NEAR(pab - pa * pb, 0.0, 1e-16);

  const double w = std::exp(-8.0);
  EXPECT_NEAR(m.partition_function, (1.0 + w) * (1.0 + w), 1e-15);
}

// Frozen from an independent cell-subset enumeration of the same window.
TEST(Measure, WindowRegression) {
  const auto m = measure(Box::square(4), 1.5, 8);
  EXPECT_EQ(m.support.entries().size(), 119u);
  EXPECT_EQ(m.configurations.size(), 5771u);
  EXPECT_NEAR(m.partition_function, 1.043653695946929, 1e-12);
  EXPECT_NEAR(m.probabilities[0], 0.9581722403547653, 1e-12);

  double total = 0.0;
  std::set<Configuration> distinct;
  for (std::size_t i = 0; i < m.configurations.size(); ++i) {
    total += m.probabilities[i];
    distinct.insert(m.configurations[i]);
    const auto& cfg = m.configurations[i];
    EXPECT_TRUE(std::is_sorted(cfg.begin(), cfg.end()));
    for (std::size_t a = 0; a < cfg.size(); ++a)
      for (std::size_t b = a + 1; b < cfg.size(); ++b)
        ASSERT_FALSE(contours_incompatible(m.contour_at(cfg[a]), m.contour_at(cfg[b])));
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(distinct.size(), m.configurations.size());
}

TEST(Measure, PartitionFunctionByDeletionRecursion) {
  // Z(support) = Z(support minus gamma) + w(gamma) Z(support minus gamma and
  // everything incompatible with it): a different traversal of the same sum.
  const auto m = measure(Box::square(4), 1.5, 8);
  const auto& entries = m.support.entries();
  const std::size_t n = entries.size();
  std::vector<std::vector<std::uint8_t>> clash(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      clash[i][j] = i != j && contours_incompatible(entries[i].contour, entries[j].contour);

  const std::function<double(std::vector<std::uint32_t>)> z =
      [&](std::vector<std::uint32_t> remaining) -> double {
    if (remaining.empty()) return 1.0;
    const std::uint32_t head = remaining.front();
    std::vector<std::uint32_t> without, thinned;
    for (std::size_t k = 1; k < remaining.size(); ++k) without.push_back(remaining[k]);
    for (std::uint32_t j : without)
      if (!clash[head][j]) thinned.push_back(j);
    return z(without) + entries[head].weight * z(thinned);
  };

  std::vector<std::uint32_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = std::uint32_t(i);
  EXPECT_NEAR(z(all), m.partition_function, 1e-12 * m.partition_function);
}

TEST(Measure, MarginalMatchesDirectSum) {
  const auto m = measure(Box::square(3), 1.5, 6);
  for (std::uint32_t idx : {std::uint32_t(0), std::uint32_t(4)}) {
    double direct = 0.0;
    for (std::size_t i = 0; i < m.configurations.size(); ++i)
      if (std::binary_search(m.configurations[i].begin(), m.configurations[i].end(), idx))
        direct += m.probabilities[i];
    const double via = expectation(m, [idx](const Configuration& c) {
      return std::binary_search(c.begin(), c.end(), idx) ? 1.0 : 0.0;
    });
    EXPECT_NEAR(via, direct, 1e-15);
  }
}

TEST(Measure, MonotoneInVolume) {
  const auto small = measure(Box::square(3), 1.5, 8);
  const auto large = measure(Box::square(4), 1.5, 8);
  EXPECT_LT(small.partition_function, large.partition_function);
  EXPECT_GT(small.probabilities[0], large.probabilities[0]);
}

TEST(Measure, FrozenAtLowTemperature) {
  const auto m = measure(Box::square(2), 50.0, 8);
  double occupied = 0.0;
  for (std::size_t i = 1; i < m.probabilities.size(); ++i) occupied += m.probabilities[i];
  EXPECT_LT(occupied, 1e-80);
  EXPECT_GE(m.probabilities[0], 1.0 - 1e-15);
}

TEST(Measure, NodeGuard) {
  EXPECT_THROW(enumerate_x(Box::square(4), 8, 1000), std::runtime_error);
  EXPECT_THROW(measure(Box::square(4), 1.5, 8, 1000), std::runtime_error);
  EXPECT_NO_THROW(measure(Box::square(1), 1.5, 4, 2));
}

}  // namespace
}  // namespace loopgas
