#include "loopgas/clan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace loopgas {
namespace {

// Pairwise edge audits are quadratic; above this many nodes resolve() checks
// only the links that are present.
constexpr std::size_t kFullAuditLimit = 4096;

}  // namespace

FreeProcessCache::FreeProcessCache(const WeightedCatalog& catalog, Rng& rng)
    : catalog_(&catalog), rng_(&rng) {
  // Stationary snapshot at time zero: alive count is Poisson with mean equal
  // to the total weight, residual lifetimes are Exp(1) by memorylessness.
  const std::uint64_t alive = rng_->poisson(catalog.total_weight());
  for (std::uint64_t k = 0; k < alive; ++k) {
    boundary_.push_back({rng_->exponential(1.0), pick_entry()});
  }
}

std::uint32_t FreeProcessCache::pick_entry() {
  return static_cast<std::uint32_t>(rng_->pick_cumulative(catalog_->cumulative_weights()));
}

void FreeProcessCache::extend(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("horizon extension must be positive");
  if (catalog_->entries().empty()) {
    horizon_ += dt;
    return;
  }
  const double old_horizon = horizon_;
  horizon_ += dt;

  // Each cylinder alive at the old horizon has Exp(1) age there.  Age below
  // dt pins its birth inside the new slab; otherwise it remains a horizon
  // cylinder, now dt older in residual terms.
  std::vector<HorizonCylinder> still_pending;
  for (const HorizonCylinder& b : boundary_) {
    const double age = rng_->exponential(1.0);
    if (age < dt) {
      const double birth = -old_horizon - age;
      realized_.push_back({birth, b.death - birth, b.entry});
    } else {
      still_pending.push_back(b);
    }
  }

  // Fresh births inside the new slab.  Those whose lifetime would carry them
  // past the old horizon are already accounted for by the pinning above, so
  // they are dropped; what remains is exactly the in-slab-dying component.
  const std::uint64_t births = rng_->poisson(catalog_->total_weight() * dt);
  for (std::uint64_t k = 0; k < births; ++k) {
    const double age_above = dt * rng_->uniform01();  // birth depth above the old horizon
    const double lifetime = rng_->exponential(1.0);
    if (lifetime < age_above) {
      realized_.push_back({-old_horizon - age_above, lifetime, pick_entry()});
    }
  }

  // Snapshot at the new horizon: cylinders alive there that die within the
  // new slab.  (Those dying later are the pinned survivors from above.)
  const double mean_fresh = catalog_->total_weight() * -std::expm1(-dt);
  const std::uint64_t fresh = rng_->poisson(mean_fresh);
  for (std::uint64_t k = 0; k < fresh; ++k) {
    const double residual = rng_->truncated_exponential(dt);
    still_pending.push_back({-horizon_ + residual, pick_entry()});
  }
  boundary_ = std::move(still_pending);
}

void FreeProcessCache::expose_through(double t) {
  if (t > 0.0) throw std::invalid_argument("free process queries live at nonpositive times");
  auto unresolved = [&] {
    if (horizon_ < -t) return true;
    for (const HorizonCylinder& b : boundary_) {
      if (b.death > t) return true;
    }
    return false;
  };
  while (unresolved()) extend(1.0);
}

std::vector<FreeCylinder> FreeProcessCache::ancestors_of(const Contour& basis, double birth) {
  expose_through(birth);
  std::vector<FreeCylinder> out;
  for (const FreeCylinder& c : realized_) {
    if (c.birth < birth && c.death() > birth &&
        contours_incompatible(basis_of(c), basis)) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<FreeCylinder> FreeProcessCache::ancestors_at(const SpaceTimePoint& point) {
  expose_through(point.time);
  std::vector<FreeCylinder> out;
  for (const FreeCylinder& c : realized_) {
    if (c.birth <= point.time && c.death() > point.time && basis_of(c).contains(point.site)) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<FreeCylinder> first_gen_ancestors(const Cylinder& query, FreeProcessCache& cache) {
  return cache.ancestors_of(query.basis, query.birth);
}

std::vector<FreeCylinder> first_gen_ancestors(const SpaceTimePoint& query,
                                              FreeProcessCache& cache) {
  return cache.ancestors_at(query);
}

void extend_horizon(FreeProcessCache& cache, double dt) { cache.extend(dt); }

std::uint64_t Clan::cumulative_size() const {
  std::uint64_t total = 0;
  for (const ClanNode& node : nodes) total += node.basis.size();
  return total;
}

ClanCapError::ClanCapError(std::uint64_t cumulative_in, int generation_in)
    : std::runtime_error("clan cap exceeded: " + std::to_string(cumulative_in) +
                         " cumulative plaquettes at generation " +
                         std::to_string(generation_in)),
      cumulative(cumulative_in),
      generation(generation_in) {}

namespace {

void require_certified_subcritical(const WeightedCatalog& catalog) {
  const BetaThreshold threshold = beta_M(2, catalog.n_max());
  if (!(catalog.beta() > threshold.upper)) {
    throw std::runtime_error(
        "clan growth is not certified subcritical at this temperature; pass an explicit cap");
  }
}

// Closure of `roots` under first-generation ancestry.  Each node's ancestor
// list is filled completely when the node is expanded, so the edge structure
// resolve() relies on is total by construction.
Clan close_over_ancestors(const std::vector<FreeCylinder>& roots, FreeProcessCache& cache,
                          std::uint64_t cap) {
  Clan clan;
  std::map<std::pair<std::uint32_t, double>, std::uint32_t> index_of;
  std::uint64_t cumulative = 0;

  auto intern = [&](const FreeCylinder& c, int generation) {
    const auto key = std::make_pair(c.entry, c.birth);
    if (const auto it = index_of.find(key); it != index_of.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(clan.nodes.size());
    clan.nodes.push_back({c, cache.basis_of(c), generation, false, {}});
    index_of.emplace(key, idx);
    cumulative += cache.basis_of(c).size();
    if (cumulative > cap) throw ClanCapError(cumulative, generation);
    return idx;
  };

  for (const FreeCylinder& root : roots) clan.roots.push_back(intern(root, 1));
  // intern() deduplicates, so roots shared between targets appear once.
  std::sort(clan.roots.begin(), clan.roots.end());
  clan.roots.erase(std::unique(clan.roots.begin(), clan.roots.end()), clan.roots.end());

  for (std::uint32_t at = 0; at < clan.nodes.size(); ++at) {
    const FreeCylinder cylinder = clan.nodes[at].cylinder;
    const int next_gen = clan.nodes[at].generation + 1;
    std::vector<std::uint32_t> links;
    for (const FreeCylinder& up : cache.ancestors_of(cache.basis_of(cylinder), cylinder.birth)) {
      links.push_back(intern(up, next_gen));
    }
    std::sort(links.begin(), links.end());
    clan.nodes[at].ancestors = std::move(links);
  }
  return clan;
}

}  // namespace

Clan build_clan(const std::vector<SpaceTimePoint>& targets, FreeProcessCache& cache,
                std::optional<std::uint64_t> cap) {
  if (!cap) require_certified_subcritical(cache.catalog());
  std::vector<FreeCylinder> roots;
  for (const SpaceTimePoint& target : targets) {
    for (const FreeCylinder& c : cache.ancestors_at(target)) roots.push_back(c);
  }
  return close_over_ancestors(roots, cache, cap.value_or(kClanCap));
}

Clan build_clan(const Cylinder& query, FreeProcessCache& cache,
                std::optional<std::uint64_t> cap) {
  if (!cap) require_certified_subcritical(cache.catalog());
  return close_over_ancestors(cache.ancestors_of(query.basis, query.birth), cache,
                              cap.value_or(kClanCap));
}

void resolve(Clan& clan) {
  const std::size_t n = clan.nodes.size();

  auto is_ancestor = [&](std::uint32_t up, std::uint32_t down) {
    const ClanNode& a = clan.nodes[up];
    const ClanNode& b = clan.nodes[down];
    return a.cylinder.birth < b.cylinder.birth && a.cylinder.death() > b.cylinder.birth &&
           contours_incompatible(a.basis, b.basis);
  };

  // Audit the links that exist, and on small clans also that none is missing.
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t up : clan.nodes[i].ancestors) {
      if (up >= n || !is_ancestor(up, i)) {
        throw std::invalid_argument("inconsistent clan: listed ancestor link is not one");
      }
    }
  }
  if (n <= kFullAuditLimit) {
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        if (i != j && is_ancestor(j, i) &&
            !std::binary_search(clan.nodes[i].ancestors.begin(), clan.nodes[i].ancestors.end(),
                                j)) {
          throw std::invalid_argument("inconsistent clan: missing ancestor link");
        }
      }
    }
  }

  // Rule one: chronological sweep.  Ancestors are strictly older, so by the
  // time a node is visited all its ancestors carry labels.
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::make_pair(clan.nodes[a].cylinder.birth, a) <
           std::make_pair(clan.nodes[b].cylinder.birth, b);
  });
  std::vector<char> swept(n, 0);
  for (std::uint32_t idx : order) {
    bool kept = true;
    for (std::uint32_t up : clan.nodes[idx].ancestors) {
      if (swept[up]) {
        kept = false;
        break;
      }
    }
    swept[idx] = kept ? 1 : 0;
  }

  // Rule two: iterative peeling to a fixed point.
  enum : char { unknown = 0, kept_label = 1, erased_label = 2 };
  std::vector<char> peeled(n, unknown);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (peeled[i] != unknown) continue;
      bool any_kept = false;
      bool all_labelled = true;
      for (std::uint32_t up : clan.nodes[i].ancestors) {
        if (peeled[up] == kept_label) any_kept = true;
        if (peeled[up] == unknown) all_labelled = false;
      }
      if (any_kept) {
        peeled[i] = erased_label;
        changed = true;
      } else if (all_labelled) {
        peeled[i] = kept_label;
        changed = true;
      }
    }
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    if (peeled[i] == unknown) {
      throw std::logic_error("clan resolution did not terminate; ancestor order is broken");
    }
    if ((peeled[i] == kept_label) != bool(swept[i])) {
      throw std::logic_error("clan resolution rules disagree");
    }
    clan.nodes[i].kept = bool(swept[i]);
  }
  clan.resolved = true;
}

std::vector<Contour> sample_window(const WeightedCatalog& window_catalog, Rng& rng,
                                   std::optional<std::uint64_t> cap) {
  if (!cap) require_certified_subcritical(window_catalog);
  const std::uint64_t effective_cap = cap.value_or(kClanCap);

  FreeProcessCache cache(window_catalog, rng);
  cache.expose_through(0.0);

  // Every catalog contour lies inside the window, so the cylinders covering
  // the window's points at time zero are exactly those alive at time zero.
  std::vector<FreeCylinder> roots;
  for (const FreeCylinder& c : cache.realized()) {
    if (c.birth <= 0.0 && c.death() > 0.0) roots.push_back(c);
  }
  Clan clan = close_over_ancestors(roots, cache, effective_cap);
  resolve(clan);

  std::vector<Contour> state;
  for (std::uint32_t idx : clan.roots) {
    if (clan.nodes[idx].kept) state.push_back(clan.nodes[idx].basis);
  }
  std::sort(state.begin(), state.end());
  return state;
}

std::vector<Contour> sample_window(const Box& volume, double beta, int n_max, Rng& rng,
                                   std::optional<std::uint64_t> cap) {
  return sample_window(build_catalog_inside(beta, n_max, volume), rng, cap);
}

ClanStats summarize(const Clan& clan) {
  ClanStats stats;
  stats.cumulative_size = clan.cumulative_size();
  std::set<Plaquette> projection;
  double oldest = 0.0;
  for (const ClanNode& node : clan.nodes) {
    projection.insert(node.basis.edges().begin(), node.basis.edges().end());
    oldest = std::min(oldest, node.cylinder.birth);
  }
  stats.projection_width = static_cast<std::uint32_t>(projection.size());
  stats.time_length = -oldest;
  return stats;
}

ClanStatsBatch clan_stats(const std::vector<SpaceTimePoint>& targets,
                          const WeightedCatalog& catalog, int replicas, Rng& rng,
                          std::optional<std::uint64_t> cap) {
  if (!cap) require_certified_subcritical(catalog);
  const std::uint64_t effective_cap = cap.value_or(kClanCap);

  ClanStatsBatch batch;
  batch.samples.reserve(replicas);
  for (int r = 0; r < replicas; ++r) {
    FreeProcessCache cache(catalog, rng);
    try {
      Clan clan = build_clan(targets, cache, effective_cap);
      resolve(clan);
      batch.samples.push_back(summarize(clan));
    } catch (const ClanCapError&) {
      ++batch.capped;
    }
  }
  return batch;
}

}  // namespace loopgas
