#include "loopgas/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <unordered_set>

namespace loopgas {

double tail_divergence_beta() { return std::log(3.0); }

namespace {

constexpr int kMinCutoff = 4;

void check_cutoff(int n_max) {
  if (n_max < kMinCutoff)
    throw std::invalid_argument("cutoff too small: need n_max >= 4");
}

void check_beta(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
}

// Remainder of sum n a_n e^{-beta n} over even n > n_max, under a_n <= 3^n.
// With rho = (3 e^{-beta})^2 and K = (n_max + 2) / 2 the bound collapses to
// the closed form 2 rho^K (K - (K-1) rho) / (1 - rho)^2.
double crude_tail(double beta, int n_max) {
  const double root = 3.0 * std::exp(-beta);
  const double rho = root * root;
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  const double k = double((n_max + 2) / 2);
  const double denom = (1.0 - rho) * (1.0 - rho);
  return 2.0 * std::pow(rho, k) * (k - (k - 1.0) * rho) / denom;
}

}  // namespace

const std::map<int, std::uint64_t>& activity_counts(int n_max) {
  check_cutoff(n_max);
  static std::mutex mutex;
  static std::map<int, std::map<int, std::uint64_t>> cache;
  std::scoped_lock lock(mutex);
  auto it = cache.find(n_max);
  if (it == cache.end())
    it = cache.emplace(n_max, ShapeTable(n_max).per_plaquette_counts()).first;
  return it->second;
}

LambdaResult lambda_beta(double beta, int n_max) {
  check_beta(beta);
  check_cutoff(n_max);
  LambdaResult out;
  for (const auto& [n, count] : activity_counts(n_max))
    out.value += double(n) * double(count) * std::exp(-beta * double(n));
  out.tail_bound = crude_tail(beta, n_max);
  out.certified = beta > tail_divergence_beta();
  return out;
}

WeightedCatalog::WeightedCatalog(double beta, int n_max, std::vector<Contour> contours)
    : beta_(beta), n_max_(n_max) {
  std::sort(contours.begin(), contours.end(), [](const Contour& a, const Contour& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  entries_.reserve(contours.size());
  cumulative_weights_.reserve(contours.size());
  for (auto& c : contours) {
    const double w = std::exp(-beta * double(c.size()));
    ++counts_[int(c.size())];
    total_weight_ += w;
    entries_.push_back({std::move(c), w});
    cumulative_weights_.push_back(total_weight_);
  }
  const LambdaResult lambda = lambda_beta(beta, n_max);
  tail_bound_ = lambda.tail_bound;
  tail_certified_ = lambda.certified;
}

WeightedCatalog build_catalog(double beta, int n_max) {
  check_beta(beta);
  check_cutoff(n_max);
  return WeightedCatalog(beta, n_max, enumerate_through({0, 0, 0}, n_max));
}

namespace {

// Every placement of every shape that covers at least one plaquette of the
// region, found by sliding each shape's covering offsets over the region's
// plaquettes and deduplicating by packed placement key.
std::vector<Contour> contours_meeting(const ShapeTable& table, const Box& region) {
  std::unordered_set<std::uint64_t> seen;
  std::vector<Contour> out;
  for (const Plaquette& q : region.plaquettes()) {
    for (std::uint32_t s = 0; s < std::uint32_t(table.shapes().size()); ++s) {
      for (const Vertex& off : table.covering_offsets(s, q.axis)) {
        const PlacedContour placed{s, q.x + off.x, q.y + off.y};
        if (seen.insert(placed.key()).second) out.push_back(table.realize(placed));
      }
    }
  }
  return out;
}

}  // namespace

WeightedCatalog build_catalog(double beta, int n_max, const Box& region) {
  check_beta(beta);
  check_cutoff(n_max);
  return WeightedCatalog(beta, n_max, contours_meeting(ShapeTable(n_max), region));
}

WeightedCatalog build_catalog_inside(double beta, int n_max, const Box& region) {
  check_beta(beta);
  check_cutoff(n_max);
  auto all = contours_meeting(ShapeTable(n_max), region);
  std::erase_if(all, [&](const Contour& c) { return !region.contains(c); });
  return WeightedCatalog(beta, n_max, std::move(all));
}

WeightedCatalog build_catalog_explicit(double beta, int n_max, std::vector<Contour> contours) {
  check_beta(beta);
  check_cutoff(n_max);
  for (const auto& c : contours)
    if (int(c.size()) > n_max)
      throw std::invalid_argument("explicit catalog entry exceeds the size cutoff");
  std::vector<Contour> sorted = contours;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("explicit catalog entries must be distinct");
  return WeightedCatalog(beta, n_max, std::move(contours));
}

BetaThreshold beta_M(int d, int n_max) {
  if (d != 2)
    throw std::invalid_argument("beta_M: contour counts are enumerated for d = 2 only");
  check_cutoff(n_max);
  const double target = 1.0 / double(d - 1);

  const auto bisect = [&](auto&& excess, double lo, double hi) {
    if (!(excess(lo) > 0.0) || !(excess(hi) < 0.0))
      throw std::logic_error("beta_M: bracket does not straddle the threshold");
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  BetaThreshold out;
  out.lower = bisect(
      [&](double b) { return lambda_beta(b, n_max).value - target; }, 1e-3, 20.0);
  out.upper = bisect(
      [&](double b) {
        const LambdaResult l = lambda_beta(b, n_max);
        return l.value + l.tail_bound - target;
      },
      tail_divergence_beta() + 1e-9, 20.0);
  return out;
}

ReferenceBounds reference_bounds(int d) {
  if (d < 2) throw std::invalid_argument("reference_bounds: need d >= 2");
  const double log_d = std::log(double(d));
  ReferenceBounds out;
  out.coarse_sufficient = 64.0 * log_d / double(d);
  out.refined_sufficient = 6.0 * log_d / double(d);
  out.necessary = log_d / (2.0 * double(d));
  return out;
}

std::pair<double, Contour> total_rate_and_sample(const WeightedCatalog& catalog,
                                                 const Box& region, Rng& rng) {
  std::vector<std::size_t> hits;
  std::vector<double> cumulative;
  double rate = 0.0;
  const auto& entries = catalog.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (region.intersects(entries[i].contour)) {
      rate += entries[i].weight;
      hits.push_back(i);
      cumulative.push_back(rate);
    }
  }
  if (hits.empty()) throw std::invalid_argument("region intersects no catalog entry");
  const std::size_t pick = rng.pick_cumulative(cumulative);
  return {rate, entries[hits[pick]].contour};
}

}  // namespace loopgas
