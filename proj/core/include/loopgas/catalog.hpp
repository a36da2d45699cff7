#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "loopgas/enumerate.hpp"
#include "loopgas/lattice.hpp"
#include "loopgas/region.hpp"
#include "loopgas/rng.hpp"

namespace loopgas {

// Below this inverse temperature the crude growth bound a_n <= 3^n no longer
// gives a summable tail, so no finite tail certificate exists.
double tail_divergence_beta();

struct LambdaResult {
  double value = 0.0;       // truncated per-plaquette activity sum n * a_n * e^{-beta n}
  double tail_bound = 0.0;  // certified bound on the neglected sizes; +inf when uncertified
  bool certified = false;   // true iff beta > tail_divergence_beta()
};

// Truncated activity through a fixed plaquette plus a certified remainder.
// The remainder uses the walk bound a_n <= 3^n restricted to even sizes, so
// it is finite exactly when 3 e^{-beta} < 1.
LambdaResult lambda_beta(double beta, int n_max);

// Per-plaquette a_n for sizes 4..n_max; cached, since threshold searches
// evaluate the same cutoff many times.
const std::map<int, std::uint64_t>& activity_counts(int n_max);

struct CatalogEntry {
  Contour contour;
  double weight = 0.0;  // e^{-beta * size}, exactly
};

// An immutable weighted list of contours at a fixed inverse temperature.
// Two builds exist: every contour through the anchor plaquette (the origin
// horizontal edge), or every contour meeting a rectangular region. Entries
// are sorted by (size, lexicographic) and never change after construction,
// so concurrent readers need no locking.
class WeightedCatalog {
 public:
  double beta() const { return beta_; }
  int n_max() const { return n_max_; }
  const std::vector<CatalogEntry>& entries() const { return entries_; }
  const std::map<int, std::uint64_t>& counts_by_size() const { return counts_; }

  // Per-plaquette remainder certificate carried over from lambda_beta.
  double tail_bound() const { return tail_bound_; }
  bool tail_certified() const { return tail_certified_; }

  double total_weight() const { return total_weight_; }

  // Inclusive prefix sums of entry weights, aligned with entries(); ready for
  // proportional sampling without per-caller setup.
  const std::vector<double>& cumulative_weights() const { return cumulative_weights_; }

 private:
  friend WeightedCatalog build_catalog(double, int);
  friend WeightedCatalog build_catalog(double, int, const Box&);
  friend WeightedCatalog build_catalog_inside(double, int, const Box&);
  friend WeightedCatalog build_catalog_explicit(double, int, std::vector<Contour>);

  WeightedCatalog(double beta, int n_max, std::vector<Contour> contours);

  double beta_ = 0.0;
  int n_max_ = 0;
  std::vector<CatalogEntry> entries_;
  std::vector<double> cumulative_weights_;
  std::map<int, std::uint64_t> counts_;
  double tail_bound_ = 0.0;
  bool tail_certified_ = false;
  double total_weight_ = 0.0;
};

// All contours of size <= n_max through the anchor plaquette.
WeightedCatalog build_catalog(double beta, int n_max);
// All contours of size <= n_max with at least one plaquette in `region`.
WeightedCatalog build_catalog(double beta, int n_max, const Box& region);
// All contours of size <= n_max lying entirely inside `region`; this is the
// support of the birth process on a finite window.
WeightedCatalog build_catalog_inside(double beta, int n_max, const Box& region);
// Catalog over an explicit support set, for rigs whose volume is not a box
// (for example two far-apart islands). Duplicates and oversized contours are
// rejected.
WeightedCatalog build_catalog_explicit(double beta, int n_max, std::vector<Contour> contours);

struct BetaThreshold {
  double lower = 0.0;  // root of value = 1/(d-1); ignores the neglected sizes
  double upper = 0.0;  // root of value + tail_bound = 1/(d-1); certified
};

// Inverse temperature where the truncated activity crosses 1/(d-1), found by
// bisection to 1e-6. The upper root adds the tail certificate, so activity
// is provably below threshold for every beta above it.
BetaThreshold beta_M(int d, int n_max);

// Closed-form threshold scales from the literature, for display next to the
// computed roots: a crude sufficient scale, a refined sufficient scale, and
// a necessary scale, all of order log(d)/d.
struct ReferenceBounds {
  double coarse_sufficient = 0.0;   // 64 log d / d
  double refined_sufficient = 0.0;  // 6 log d / d
  double necessary = 0.0;           // log d / (2d)
};
ReferenceBounds reference_bounds(int d);

// Restrict `catalog` to the entries meeting `region`, return their total
// weight and one entry drawn proportionally to weight.
std::pair<double, Contour> total_rate_and_sample(const WeightedCatalog& catalog,
                                                 const Box& region, Rng& rng);

}  // namespace loopgas
