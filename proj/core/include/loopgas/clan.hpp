#pragma once

// Backward construction of the stationary loss network.  A FreeProcessCache
// realizes the time-stationary free birth process on a growing past window
// (-T, 0]; clans of ancestors are explored breadth-first through it, then a
// kept/erased resolution turns the clan into an exact stationary sample.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "loopgas/catalog.hpp"
#include "loopgas/forward.hpp"
#include "loopgas/lattice.hpp"
#include "loopgas/region.hpp"
#include "loopgas/rng.hpp"

namespace loopgas {

// A realized cylinder of the free process, identified by catalog position.
struct FreeCylinder {
  double birth = 0.0;
  double lifetime = 0.0;
  std::uint32_t entry = 0;

  double death() const { return birth + lifetime; }
  friend bool operator==(const FreeCylinder&, const FreeCylinder&) = default;
};

// A cylinder known to be alive at the current horizon whose birth lies beyond
// it.  Its death time is fixed; the birth is realized lazily when the horizon
// moves past it.
struct HorizonCylinder {
  double death = 0.0;
  std::uint32_t entry = 0;
};

struct SpaceTimePoint {
  Plaquette site;
  double time = 0.0;
};

// Lazily generated free process over (-horizon, 0].  Per catalog entry the
// realized births form a Poisson process with rate equal to the entry weight
// and Exp(1) lifetimes, independent across entries; the horizon snapshot is
// the stationary marginal.  Extension appends history without disturbing
// anything a query may already have seen, which is what makes the backward
// sampler exact.  One owner at a time; queries mutate internal state.
class FreeProcessCache {
 public:
  FreeProcessCache(const WeightedCatalog& catalog, Rng& rng);

  const WeightedCatalog& catalog() const { return *catalog_; }
  double horizon() const { return horizon_; }
  const std::vector<FreeCylinder>& realized() const { return realized_; }
  const std::vector<HorizonCylinder>& horizon_cylinders() const { return boundary_; }

  // Deepen the window by dt: the horizon snapshot is resolved one slab
  // further, fresh in-slab births are drawn, and a fresh snapshot is taken
  // at the new horizon.
  void extend(double dt);

  // Extend until every cylinder alive at time t (<= 0) has a realized birth.
  void expose_through(double t);

  // Every realized cylinder incompatible with `basis`, born strictly before
  // `birth` and still alive at it.
  std::vector<FreeCylinder> ancestors_of(const Contour& basis, double birth);

  // Every realized cylinder whose basis covers the site and is alive at the
  // point's time.
  std::vector<FreeCylinder> ancestors_at(const SpaceTimePoint& point);

  const Contour& basis_of(const FreeCylinder& c) const {
    return catalog_->entries()[c.entry].contour;
  }

 private:
  const WeightedCatalog* catalog_;
  Rng* rng_;
  std::vector<FreeCylinder> realized_;
  std::vector<HorizonCylinder> boundary_;
  double horizon_ = 0.0;

  std::uint32_t pick_entry();
};

std::vector<FreeCylinder> first_gen_ancestors(const Cylinder& query, FreeProcessCache& cache);
std::vector<FreeCylinder> first_gen_ancestors(const SpaceTimePoint& query,
                                              FreeProcessCache& cache);
void extend_horizon(FreeProcessCache& cache, double dt);

struct ClanNode {
  FreeCylinder cylinder;
  Contour basis;
  int generation = 0;  // 1 for nodes answering the query directly
  bool kept = false;   // meaningful once the clan is resolved
  std::vector<std::uint32_t> ancestors;  // complete first-generation links
};

struct Clan {
  std::vector<ClanNode> nodes;       // breadth-first discovery order
  std::vector<std::uint32_t> roots;  // generation-1 nodes
  bool resolved = false;

  std::uint64_t cumulative_size() const;  // total plaquettes over all nodes
};

// Growth guard: cumulative plaquettes across the clan under construction.
inline constexpr std::uint64_t kClanCap = 10'000'000;

// Thrown when a clan outgrows its cap; carries progress diagnostics.
class ClanCapError : public std::runtime_error {
 public:
  ClanCapError(std::uint64_t cumulative, int generation);
  std::uint64_t cumulative = 0;
  int generation = 0;
};

// Breadth-first ancestor closure of the target points.  Without an explicit
// cap the catalog temperature must lie above the certified subcritical
// threshold; passing a cap waives that check.
Clan build_clan(const std::vector<SpaceTimePoint>& targets, FreeProcessCache& cache,
                std::optional<std::uint64_t> cap = std::nullopt);

// Ancestor closure of one cylinder (the cylinder itself is not a node).
Clan build_clan(const Cylinder& query, FreeProcessCache& cache,
                std::optional<std::uint64_t> cap = std::nullopt);

// Labels every node kept or erased.  Two independent rules are run: a
// chronological sweep (kept iff no kept ancestor) and the iterative peeling
// (no-ancestor nodes kept, anything with a kept ancestor erased, repeat);
// they must agree.  Edge lists are audited first: a missing or bogus
// ancestor link throws.
void resolve(Clan& clan);

// One exact draw from the stationary law on the window the catalog spans.
// The catalog must hold exactly the contours lying inside the window (the
// build_catalog_inside form).
std::vector<Contour> sample_window(const WeightedCatalog& window_catalog, Rng& rng,
                                   std::optional<std::uint64_t> cap = std::nullopt);
std::vector<Contour> sample_window(const Box& volume, double beta, int n_max, Rng& rng,
                                   std::optional<std::uint64_t> cap = std::nullopt);

struct ClanStats {
  std::uint64_t cumulative_size = 0;   // total plaquettes over clan nodes
  std::uint32_t projection_width = 0;  // distinct plaquettes in the union of bases
  double time_length = 0.0;            // depth of the oldest birth below the query time
};

ClanStats summarize(const Clan& clan);

struct ClanStatsBatch {
  std::vector<ClanStats> samples;
  int capped = 0;  // replicas abandoned at the cap, excluded from samples
};

// Independent replicas of the clan of `targets`, each on a fresh cache.
ClanStatsBatch clan_stats(const std::vector<SpaceTimePoint>& targets,
                          const WeightedCatalog& catalog, int replicas, Rng& rng,
                          std::optional<std::uint64_t> cap = std::nullopt);

}  // namespace loopgas
