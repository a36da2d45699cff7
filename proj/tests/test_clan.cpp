#include "loopgas/clan.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "loopgas/oracle.hpp"
#include "loopgas/stats.hpp"

namespace loopgas {
namespace {

Contour unit_square(int cx, int cy) {
  return Contour({{cx, cy, 0}, {cx, cy + 1, 0}, {cx, cy, 1}, {cx + 1, cy, 1}});
}

// Frozen references at beta=2, n_max=10, computed externally: mean total
// progeny of the dominating branching process, and the cluster-width envelope
// constants (prefactor and rate).
constexpr double kMeanProgeny = 1.0029496879450022;
constexpr double kWidthPrefactor = 3.089575962247956;
constexpr double kWidthRate = 0.9725145316881767;

TEST(Cache, StationarySnapshotMoments) {
  // Two squares far enough apart to be independent in every sense.
  const auto catalog =
      build_catalog_explicit(0.3, 4, {unit_square(0, 0), unit_square(10, 10)});
  const double w = std::exp(-4.0 * 0.3);
  const double total = catalog.total_weight();
  ASSERT_NEAR(total, 2.0 * w, 1e-15);

  Rng rng(501);
  const int replicas = 20000;
  RunningMoments count;
  long per_entry[2] = {0, 0};
  for (int r = 0; r < replicas; ++r) {
    FreeProcessCache cache(catalog, rng);
    count.push(double(cache.horizon_cylinders().size()));
    for (const HorizonCylinder& b : cache.horizon_cylinders()) {
      ASSERT_LT(b.entry, 2u);
      ASSERT_GT(b.death, 0.0);
      per_entry[b.entry] += 1;
    }
  }
  EXPECT_NEAR(count.mean(), total, 3.0 * std::sqrt(total / replicas));
  EXPECT_GT(count.variance() / total, 0.9);
  EXPECT_LT(count.variance() / total, 1.1);
  for (long n : per_entry) {
    EXPECT_NEAR(double(n) / replicas, w, 3.0 * std::sqrt(w / replicas));
  }
}

TEST(Cache, ExtensionPreservesStationarity) {
  const auto catalog =
      build_catalog_explicit(0.3, 4, {unit_square(0, 0), unit_square(10, 10)});
  const double w = std::exp(-4.0 * 0.3);
  const double total = catalog.total_weight();

  Rng rng(502);
  const int replicas = 20000;
  RunningMoments snapshot_after;
  long first_slab[2] = {0, 0};
  long second_slab[2] = {0, 0};
  for (int r = 0; r < replicas; ++r) {
    FreeProcessCache cache(catalog, rng);
    cache.extend(1.5);
    snapshot_after.push(double(cache.horizon_cylinders().size()));
    cache.extend(2.0);
    for (const FreeCylinder& c : cache.realized()) {
      ASSERT_LE(c.birth, 0.0);
      ASSERT_GT(c.birth, -3.5);
      ASSERT_GT(c.lifetime, 0.0);
      if (c.birth > -1.5) {
        first_slab[c.entry] += 1;
      } else {
        second_slab[c.entry] += 1;
      }
    }
  }
  // The horizon snapshot is stationary after an extension...
  EXPECT_NEAR(snapshot_after.mean(), total, 3.0 * std::sqrt(total / replicas));
  // ...and realized births per contour fill each slab at the contour's rate.
  for (long n : first_slab) {
    const double mean = w * 1.5;
    EXPECT_NEAR(double(n) / replicas, mean, 3.0 * std::sqrt(mean / replicas));
  }
  for (long n : second_slab) {
    const double mean = w * 2.0;
    EXPECT_NEAR(double(n) / replicas, mean, 3.0 * std::sqrt(mean / replicas));
  }
}

TEST(Cache, ExposedHistoryImmutable) {
  const auto catalog = build_catalog_inside(1.5, 8, Box::square(4));
  Rng rng(503);
  for (int r = 0; r < 200; ++r) {
    FreeProcessCache cache(catalog, rng);
    cache.expose_through(0.0);
    const std::vector<FreeCylinder> seen = cache.realized();
    const double depth = cache.horizon();
    cache.extend(1.0);
    cache.extend(3.0);
    cache.expose_through(-2.0);

    ASSERT_GE(cache.realized().size(), seen.size());
    EXPECT_TRUE(std::equal(seen.begin(), seen.end(), cache.realized().begin()));
    for (std::size_t i = seen.size(); i < cache.realized().size(); ++i) {
      EXPECT_LE(cache.realized()[i].birth, -depth);
    }
  }
}

TEST(Cache, PointQueriesCoverAndAudit) {
  const auto catalog = build_catalog_explicit(0.5, 4, {unit_square(0, 0)});
  const double w = std::exp(-2.0);

  Rng rng(504);
  const int replicas = 20000;
  int covered = 0;
  for (int r = 0; r < replicas; ++r) {
    FreeProcessCache cache(catalog, rng);
    EXPECT_TRUE(cache.ancestors_at({{50, 50, 0}, 0.0}).empty());
    const auto at_edge = cache.ancestors_at({{0, 0, 0}, 0.0});
    if (!at_edge.empty()) ++covered;
    for (const FreeCylinder& c : at_edge) {
      EXPECT_LE(c.birth, 0.0);
      EXPECT_GT(c.death(), 0.0);
      EXPECT_TRUE(cache.basis_of(c).contains({0, 0, 0}));
    }
  }
  const double p = -std::expm1(-w);  // alive count is Poisson(w)
  EXPECT_NEAR(double(covered) / replicas, p, 3.0 * std::sqrt(p * (1.0 - p) / replicas));
}

TEST(Ancestors, CylinderMeanMatchesIncompatibleWeights) {
  const auto catalog = build_catalog_inside(1.5, 6, Box::square(4));
  const Contour center = unit_square(1, 1);
  double expected = 0.0;
  for (const CatalogEntry& entry : catalog.entries()) {
    if (contours_incompatible(entry.contour, center)) expected += entry.weight;
  }
  ASSERT_GT(expected, 0.01);

  Rng rng(505);
  const int replicas = 20000;
  long found = 0;
  for (int r = 0; r < replicas; ++r) {
    FreeProcessCache cache(catalog, rng);
    const auto up = first_gen_ancestors(Cylinder{center, 0.0, 1.0}, cache);
    found += long(up.size());
    for (const FreeCylinder& c : up) {
      EXPECT_LT(c.birth, 0.0);
      EXPECT_GT(c.death(), 0.0);
      EXPECT_TRUE(contours_incompatible(cache.basis_of(c), center));
    }
  }
  EXPECT_NEAR(double(found) / replicas, expected, 3.0 * std::sqrt(expected / replicas));
}

TEST(Clan, EmptyWhenNothingCovers) {
  // The only catalog contour sits far from the queried point.
  const auto catalog = build_catalog_explicit(1.5, 4, {unit_square(30, 30)});
  Rng rng(506);
  for (int r = 0; r < 100; ++r) {
    FreeProcessCache cache(catalog, rng);
    Clan clan = build_clan({{{{0, 0, 0}, 0.0}}}, cache, std::uint64_t{1000});
    EXPECT_TRUE(clan.nodes.empty());
    EXPECT_TRUE(clan.roots.empty());
    resolve(clan);
    EXPECT_TRUE(clan.resolved);
    EXPECT_EQ(summarize(clan).cumulative_size, 0u);
    EXPECT_EQ(summarize(clan).time_length, 0.0);
  }
}

TEST(Clan, DeterministicGivenSeed) {
  const auto catalog = build_catalog_inside(1.5, 6, Box::square(4));
  const SpaceTimePoint target{{1, 1, 0}, 0.0};
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    Rng rng_a(seed), rng_b(seed);
    FreeProcessCache cache_a(catalog, rng_a), cache_b(catalog, rng_b);
    Clan a = build_clan({target}, cache_a);
    Clan b = build_clan({target}, cache_b);
    resolve(a);
    resolve(b);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      EXPECT_EQ(a.nodes[i].cylinder, b.nodes[i].cylinder);
      EXPECT_EQ(a.nodes[i].generation, b.nodes[i].generation);
      EXPECT_EQ(a.nodes[i].kept, b.nodes[i].kept);
      EXPECT_EQ(a.nodes[i].ancestors, b.nodes[i].ancestors);
    }
    EXPECT_EQ(a.roots, b.roots);
  }
}

TEST(Clan, PointClanIsUnionOfCylinderClans) {
  const auto catalog = build_catalog_inside(0.8, 4, Box{-1, -2, 3, 6});
  const SpaceTimePoint target{{0, 0, 0}, 0.0};
  const std::uint64_t cap = 100000;
  auto key = [](const FreeCylinder& c) { return std::make_pair(c.entry, c.birth); };

  Rng rng(507);
  int nonempty = 0;
  for (int r = 0; r < 400; ++r) {
    FreeProcessCache cache(catalog, rng);
    const Clan whole = build_clan({target}, cache, cap);
    if (!whole.nodes.empty()) ++nonempty;

    std::set<std::pair<std::uint32_t, double>> expected;
    for (const FreeCylinder& c : first_gen_ancestors(target, cache)) {
      expected.insert(key(c));
      const Clan upward = build_clan(Cylinder{cache.basis_of(c), c.birth, c.lifetime}, cache, cap);
      for (const ClanNode& node : upward.nodes) expected.insert(key(node.cylinder));
    }
    std::set<std::pair<std::uint32_t, double>> got;
    for (const ClanNode& node : whole.nodes) got.insert(key(node.cylinder));
    ASSERT_EQ(got, expected) << "replica " << r;
  }
  ASSERT_GT(nonempty, 10);
}

TEST(Resolve, HandBuiltChainAlternates) {
  Clan single;
  single.nodes.push_back({FreeCylinder{-1.0, 2.0, 0}, unit_square(0, 0), 1, false, {}});
  single.roots = {0};
  resolve(single);
  EXPECT_TRUE(single.nodes[0].kept);

  // C1 <- C2 <- C3: each the sole ancestor of the next.  C1 and C3 share a
  // basis but C1 is dead by C3's birth, so no edge between them.
  Clan chain;
  chain.nodes.push_back({FreeCylinder{0.0, 1.5, 0}, unit_square(0, 0), 3, false, {}});
  chain.nodes.push_back({FreeCylinder{1.0, 2.0, 1}, unit_square(1, 0), 2, false, {0}});
  chain.nodes.push_back({FreeCylinder{2.0, 1.0, 0}, unit_square(0, 0), 1, false, {1}});
  chain.roots = {2};
  resolve(chain);
  EXPECT_TRUE(chain.nodes[0].kept);
  EXPECT_FALSE(chain.nodes[1].kept);
  EXPECT_TRUE(chain.nodes[2].kept);
}

TEST(Resolve, RejectsInconsistentClans) {
  // Overlapping incompatible pair with the link omitted.
  Clan missing;
  missing.nodes.push_back({FreeCylinder{0.0, 5.0, 0}, unit_square(0, 0), 2, false, {}});
  missing.nodes.push_back({FreeCylinder{1.0, 1.0, 1}, unit_square(1, 0), 1, false, {}});
  EXPECT_THROW(resolve(missing), std::invalid_argument);

  // A listed link between compatible bases is just as inconsistent.
  Clan bogus;
  bogus.nodes.push_back({FreeCylinder{0.0, 5.0, 0}, unit_square(0, 0), 2, false, {}});
  bogus.nodes.push_back({FreeCylinder{1.0, 1.0, 1}, unit_square(5, 5), 1, false, {0}});
  EXPECT_THROW(resolve(bogus), std::invalid_argument);
}

TEST(Resolve, DualRulesAgreeOnRandomClans) {
  const auto catalog = build_catalog_inside(0.8, 4, Box{-1, -2, 3, 6});
  const SpaceTimePoint target{{0, 0, 0}, 0.0};
  Rng rng(508);
  int nonempty = 0;
  for (int r = 0; r < 1000; ++r) {
    FreeProcessCache cache(catalog, rng);
    Clan clan = build_clan({target}, cache, std::uint64_t{100000});
    resolve(clan);  // asserts sweep == peeling internally
    if (!clan.nodes.empty()) ++nonempty;
    for (const ClanNode& node : clan.nodes) {
      bool kept_ancestor = false;
      for (std::uint32_t up : node.ancestors) {
        kept_ancestor = kept_ancestor || clan.nodes[up].kept;
      }
      EXPECT_EQ(node.kept, !kept_ancestor);
    }
  }
  EXPECT_GT(nonempty, 40);
}

TEST(Clan, CertificationGateAndCap) {
  // beta=1.2 has no subcritical certificate at this cutoff: the walk-bound
  // tail diverges there, so capless construction must refuse.
  const auto mild = build_catalog_inside(1.2, 4, Box::square(2));
  Rng rng(509);
  FreeProcessCache cache(mild, rng);
  EXPECT_THROW(build_clan({{{{0, 0, 0}, 0.0}}}, cache), std::runtime_error);
  EXPECT_NO_THROW(build_clan({{{{0, 0, 0}, 0.0}}}, cache, std::uint64_t{1000}));

  // Hot and dense: ancestral growth is supercritical, so a small cap must
  // eventually trip and report its progress.
  const auto hot = build_catalog_inside(0.35, 4, Box::square(20));
  Rng hot_rng(510);
  int tripped = 0;
  for (int r = 0; r < 60 && tripped == 0; ++r) {
    FreeProcessCache hot_cache(hot, hot_rng);
    try {
      build_clan({{{{10, 10, 0}, 0.0}}}, hot_cache, std::uint64_t{200});
    } catch (const ClanCapError& err) {
      ++tripped;
      EXPECT_GT(err.cumulative, 200u);
      EXPECT_GE(err.generation, 1);
      EXPECT_NE(std::string(err.what()).find("clan cap exceeded"), std::string::npos);
    }
  }
  EXPECT_EQ(tripped, 1);
}

TEST(Window, SmallLawsExactly) {
  // One admissible square: occupied with probability w/(1+w).
  Rng rng(511);
  const auto one = build_catalog_inside(0.5, 4, Box::square(1));
  ASSERT_EQ(one.entries().size(), 1u);
  const double w = std::exp(-2.0);
  const int draws = 100000;
  int occupied = 0;
  for (int r = 0; r < draws; ++r) {
    occupied += sample_window(one, rng, std::uint64_t{1000000}).empty() ? 0 : 1;
  }
  const double p1 = w / (1.0 + w);
  EXPECT_NEAR(double(occupied) / draws, p1, 3.0 * std::sqrt(p1 * (1.0 - p1) / draws));

  // Two mutually blocking squares: Z = 1 + 2w.
  const auto two = build_catalog_inside(0.5, 4, Box{0, 0, 2, 1});
  ASSERT_EQ(two.entries().size(), 2u);
  int counts[3] = {0, 0, 0};  // empty, left square, right square
  const Contour left = unit_square(0, 0);
  for (int r = 0; r < draws; ++r) {
    const auto state = sample_window(two, rng, std::uint64_t{1000000});
    ASSERT_LE(state.size(), 1u);
    if (state.empty()) {
      counts[0] += 1;
    } else {
      counts[state[0] == left ? 1 : 2] += 1;
    }
  }
  const double z = 1.0 + 2.0 * w;
  const double expected[3] = {1.0 / z, w / z, w / z};
  for (int k = 0; k < 3; ++k) {
    const double band = 3.0 * std::sqrt(expected[k] * (1.0 - expected[k]) / draws);
    EXPECT_NEAR(double(counts[k]) / draws, expected[k], band) << "state " << k;
  }

  // Cold certified variant needs no cap override.
  const auto cold = build_catalog_inside(2.0, 4, Box::square(1));
  Rng cold_rng(512);
  int cold_hits = 0;
  for (int r = 0; r < draws; ++r) {
    cold_hits += sample_window(cold, cold_rng).empty() ? 0 : 1;
  }
  const double p_cold = std::exp(-8.0) / (1.0 + std::exp(-8.0));
  EXPECT_NEAR(double(cold_hits), draws * p_cold, 3.0 * std::sqrt(draws * p_cold) + 1.0);
}

TEST(Window, MatchesOracleOnWindow) {
  const Box box = Box::square(4);
  const double beta = 1.5;
  const ExactMeasure exact = measure(box, beta, 8);
  std::map<std::vector<Contour>, double> target;
  for (std::size_t i = 0; i < exact.configurations.size(); ++i) {
    std::vector<Contour> sorted_config;
    for (std::uint32_t idx : exact.configurations[i]) {
      sorted_config.push_back(exact.contour_at(idx));
    }
    std::sort(sorted_config.begin(), sorted_config.end());
    target[sorted_config] = exact.probabilities[i];
  }

  const auto catalog = build_catalog_inside(beta, 8, box);
  Rng rng(513);
  const int draws = 30000;
  std::map<std::vector<Contour>, int> counts;
  for (int r = 0; r < draws; ++r) {
    counts[sample_window(catalog, rng)] += 1;
  }

  double tv = 0.0;
  for (const auto& [state, prob] : target) {
    const auto it = counts.find(state);
    const double freq = it == counts.end() ? 0.0 : double(it->second) / draws;
    tv += std::abs(freq - prob);
  }
  for (const auto& [state, n] : counts) {
    ASSERT_TRUE(target.count(state)) << "sampled a state outside the exact support";
  }
  EXPECT_LT(0.5 * tv, 0.015);
}

TEST(Stats, TailsDominationAndEnvelope) {
  const auto catalog = build_catalog_inside(2.0, 10, Box{-5, -5, 10, 10});
  Rng rng(514);
  const int replicas = 300000;
  const ClanStatsBatch batch = clan_stats({{{0, 0, 0}, 0.0}}, catalog, replicas, rng);
  ASSERT_EQ(batch.capped, 0);
  ASSERT_EQ(batch.samples.size(), std::size_t(replicas));

  RunningMoments size_moments;
  std::uint32_t max_width = 0;
  int nonempty = 0;
  for (const ClanStats& s : batch.samples) {
    EXPECT_LE(s.projection_width, s.cumulative_size);
    EXPECT_GE(s.time_length, 0.0);
    size_moments.push(double(s.cumulative_size));
    max_width = std::max(max_width, s.projection_width);
    if (s.cumulative_size > 0) {
      ++nonempty;
      EXPECT_GT(s.time_length, 0.0);
    }
  }
  ASSERT_GT(nonempty, 100);
  // One-sided domination by the branching-process progeny mean.
  EXPECT_LE(size_moments.mean(), kMeanProgeny);

  // Width envelope, pointwise over the observed support.  The prefactor and
  // rate leave orders of magnitude of slack at this temperature.
  for (std::uint32_t width = 0; width <= max_width; ++width) {
    int above = 0;
    for (const ClanStats& s : batch.samples) {
      if (s.projection_width > width) ++above;
    }
    EXPECT_LE(double(above) / replicas, kWidthPrefactor * std::exp(-kWidthRate * width))
        << "width " << width;
  }

  // Time-length tail: log-survival slope against the theoretical decay.
  std::vector<double> grid, log_survivors;
  for (double t = 0.0; t <= 2.0; t += 0.4) {
    int above = 0;
    for (const ClanStats& s : batch.samples) {
      if (s.time_length > t) ++above;
    }
    if (above < 20) break;
    grid.push_back(t);
    log_survivors.push_back(std::log(double(above)));
  }
  ASSERT_GE(grid.size(), 4u);
  const LineFit fit = fit_line(grid, log_survivors);
  EXPECT_GE(-fit.slope, 0.85);
}

TEST(Clan, SharedCylinderProbabilityDecays) {
  const auto catalog = build_catalog_inside(1.2, 4, Box{-1, -2, 3, 9});
  const std::uint64_t cap = 100000;
  auto key = [](const FreeCylinder& c) { return std::make_pair(c.entry, c.birth); };
  auto clans_share = [&](FreeProcessCache& cache, int k) {
    const Clan a = build_clan({{{{0, 0, 0}, 0.0}}}, cache, cap);
    const Clan b = build_clan({{{{0, k, 0}, 0.0}}}, cache, cap);
    std::set<std::pair<std::uint32_t, double>> seen;
    for (const ClanNode& node : a.nodes) seen.insert(key(node.cylinder));
    for (const ClanNode& node : b.nodes) {
      if (seen.count(key(node.cylinder))) return true;
    }
    return false;
  };

  Rng rng(515);
  const int replicas = 200000;
  int near_shares = 0, far_shares = 0;
  for (int r = 0; r < replicas; ++r) {
    FreeProcessCache cache(catalog, rng);
    if (clans_share(cache, 1)) ++near_shares;
  }
  for (int r = 0; r < replicas; ++r) {
    FreeProcessCache cache(catalog, rng);
    if (clans_share(cache, 4)) ++far_shares;
  }
  // Adjacent points can share a single covering cylinder; distant points
  // need a multi-cylinder bridge, which costs extra weight factors.
  EXPECT_GT(near_shares, 1000);
  EXPECT_LT(far_shares * 20, near_shares);
}

}  // namespace
}  // namespace loopgas
