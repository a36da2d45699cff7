#include "loopgas/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "loopgas/branching.hpp"
#include "loopgas/catalog.hpp"
#include "loopgas/clan.hpp"
#include "loopgas/forward.hpp"
#include "loopgas/lattice.hpp"
#include "loopgas/oracle.hpp"
#include "loopgas/region.hpp"
#include "loopgas/rng.hpp"
#include "loopgas/stats.hpp"

namespace loopgas {
namespace {

// Stream tags, one per experiment, so one root seed shared across experiments
// never aliases replica streams.
constexpr std::uint64_t kTagConvergence = 0xE2;
constexpr std::uint64_t kTagClustering = 0xE4;
constexpr std::uint64_t kTagClt = 0xE5;
constexpr std::uint64_t kTagPoisson = 0xE6;
constexpr std::uint64_t kTagClanTails = 0xE7;

Contour unit_square(int cx, int cy) {
  return Contour({{cx, cy, 0}, {cx, cy + 1, 0}, {cx, cy, 1}, {cx + 1, cy, 1}});
}

// First-fit packing over the catalog order (size, then lexicographic), so the
// result is a deterministic maximal compatible set dominated by small contours.
std::vector<Contour> greedy_packing(const WeightedCatalog& catalog) {
  std::vector<Contour> kept;
  for (const auto& entry : catalog.entries()) {
    bool blocked = false;
    for (const auto& held : kept) {
      if (contours_incompatible(entry.contour, held)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) kept.push_back(entry.contour);
  }
  return kept;
}

double presence_probability(const ExactMeasure& m, const Contour& target) {
  const auto& entries = m.support.entries();
  std::uint32_t index = std::uint32_t(entries.size());
  for (std::uint32_t i = 0; i < entries.size(); ++i) {
    if (entries[i].contour == target) {
      index = i;
      break;
    }
  }
  if (index == entries.size())
    throw std::logic_error("observable contour lies outside the measure's support");
  return expectation(m, [index](const Configuration& c) {
    return std::binary_search(c.begin(), c.end(), index) ? 1.0 : 0.0;
  });
}

// Distance from a plaquette to the nearest plaquette outside the box. The
// metric is monotone along each axis, so the minimum over the one-cell ring
// around the box equals the minimum over the whole complement.
int distance_to_complement(const Plaquette& p, const Box& box) {
  const Box grown{box.x0 - 1, box.y0 - 1, box.side_x + 2, box.side_y + 2};
  int best = std::numeric_limits<int>::max();
  for (const auto& q : grown.plaquettes()) {
    if (!box.contains(q)) best = std::min(best, plaquette_distance(p, q));
  }
  return best;
}

// Pair envelope 2 m2^2 sum |x-y| e^{-m3 |x-y|} over support plaquette pairs.
double pair_envelope(const Contour& f, const Contour& g, double m2, double m3) {
  double sum = 0.0;
  for (const auto& p : f.edges()) {
    for (const auto& q : g.edges()) {
      const double dist = plaquette_distance(p, q);
      sum += dist * std::exp(-m3 * dist);
    }
  }
  return 2.0 * m2 * m2 * sum;
}

}  // namespace

ConvergenceReport run_convergence(const ConvergenceConfig& config) {
  if (config.replicas <= 0) throw std::invalid_argument("convergence needs at least one replica");
  if (config.grid_step <= 0.0 || config.t_end < config.grid_step)
    throw std::invalid_argument("convergence needs a positive time grid");
  if (config.box_side < 2) throw std::invalid_argument("convergence box is too small to pack");

  const Box box = Box::square(config.box_side);
  const WeightedCatalog catalog = build_catalog_inside(config.beta, config.n_max, box);
  const std::vector<Contour> full_state = greedy_packing(catalog);

  ConvergenceReport report;
  report.config = config;
  report.full_start_size = full_state.size();

  const int points = int(config.t_end / config.grid_step) + 1;
  report.times.resize(points);
  for (int i = 0; i < points; ++i) report.times[i] = i * config.grid_step;

  std::vector<double> sums(points, 0.0);
  int coalesced = 0;
  double coalescence_sum = 0.0;
  for (int r = 0; r < config.replicas; ++r) {
    Rng rng(derive_seed(config.seed, kTagConvergence, std::uint64_t(r)));
    const std::vector<Cylinder> full_initial = initial_cylinders(full_state, rng);
    const MarkStream marks = generate_marks(catalog, box, config.t_end, rng);
    const CouplingResult result = couple(full_initial, {}, marks);

    std::size_t next = 0;
    std::uint32_t value = 0;
    for (int i = 0; i < points; ++i) {
      while (next < result.discrepancy_steps.size() &&
             result.discrepancy_steps[next].first <= report.times[i]) {
        value = result.discrepancy_steps[next].second;
        ++next;
      }
      sums[i] += value;
    }
    if (result.coalesced) {
      ++coalesced;
      coalescence_sum += result.coalescence_time;
    }
  }

  report.mean_discrepancy.resize(points);
  for (int i = 0; i < points; ++i) report.mean_discrepancy[i] = sums[i] / config.replicas;
  report.coalesced_fraction = double(coalesced) / config.replicas;
  report.mean_coalescence_time = coalesced > 0 ? coalescence_sum / coalesced : 0.0;

  const BranchingSpec spec = BranchingSpec::planar(config.beta, config.n_max);
  const double m = spec.mean_offspring();
  report.reference_rate = (1.0 - m) / (2.0 - m);

  // Log-linear fit of the mean curve, keeping grid points with at least 20
  // pooled discrepancy units so the log does not chase single stragglers.
  std::vector<double> xs, ys;
  for (int i = 0; i < points; ++i) {
    if (sums[i] >= 20.0) {
      xs.push_back(report.times[i]);
      ys.push_back(std::log(report.mean_discrepancy[i]));
    }
  }
  if (xs.size() >= 3) {
    const LineFit fit = fit_line(xs, ys);
    report.fit_present = true;
    report.fitted_rate = -fit.slope;
    report.fitted_rate_se = fit.slope_se;
    report.rate_dominates = report.fitted_rate >= report.reference_rate - config.rate_slack;
  }
  return report;
}

VolumeEffectReport run_volume_effect(const VolumeEffectConfig& config) {
  if (config.half_widths.empty())
    throw std::invalid_argument("volume effect needs at least one inner strip");
  for (std::size_t i = 0; i < config.half_widths.size(); ++i) {
    if (config.half_widths[i] < 1 ||
        (i > 0 && config.half_widths[i] <= config.half_widths[i - 1]) ||
        config.half_widths[i] >= config.reference_half_width)
      throw std::invalid_argument("half widths must increase and stay below the reference");
  }
  if (config.strip_height < 1) throw std::invalid_argument("strip height must be positive");

  const auto strip_box = [&config](int half_width) {
    const int y0 = -(config.strip_height - 1) / 2;
    return Box{-half_width, y0, 2 * half_width + 1, config.strip_height};
  };
  const Contour center = unit_square(0, 0);

  VolumeEffectReport report;
  report.config = config;

  const ExactMeasure reference =
      measure(strip_box(config.reference_half_width), config.beta, config.n_max);
  report.reference_value = presence_probability(reference, center);

  const CriticalPoints tilt = critical_points(BranchingSpec::planar(config.beta, config.n_max));
  const double m2 = tilt.a_bar;
  const double m3 = std::log(tilt.b_bar);
  report.reference_rate = m3;

  for (const int h : config.half_widths) {
    const Box inner_box = strip_box(h);
    const ExactMeasure inner = measure(inner_box, config.beta, config.n_max);
    VolumeGap gap;
    gap.half_width = h;
    gap.inner_value = presence_probability(inner, center);
    gap.gap = std::abs(gap.inner_value - report.reference_value);
    double sum = 0.0;
    for (const auto& p : center.edges())
      sum += std::exp(-m3 * distance_to_complement(p, inner_box));
    gap.bound = m2 * sum;
    gap.within = gap.gap <= gap.bound;
    report.gaps.push_back(gap);
  }

  report.all_within = std::all_of(report.gaps.begin(), report.gaps.end(),
                                  [](const VolumeGap& g) { return g.within; });
  report.monotone = report.gaps.size() >= 3;
  for (std::size_t i = 1; i < report.gaps.size(); ++i) {
    if (report.gaps[i].gap > report.gaps[i - 1].gap) report.monotone = false;
  }

  // Gaps shrink through many decades here; everything within two decades of
  // the rounding floor of the enumeration sums is excluded from the fit.
  std::vector<double> xs, ys;
  for (const auto& g : report.gaps) {
    if (g.gap > 1e-17) {
      xs.push_back(g.half_width);
      ys.push_back(std::log(g.gap));
    }
  }
  if (xs.size() >= 2) {
    const LineFit fit = fit_line(xs, ys);
    report.fit_present = true;
    report.fitted_rate = -fit.slope;
    report.fitted_rate_se = fit.slope_se;
    report.rate_dominates = report.fitted_rate >= report.reference_rate - config.rate_slack;
  }
  return report;
}

ClusteringReport run_clustering(const ClusteringConfig& config) {
  if (config.replicas < config.batches || config.batches < 2)
    throw std::invalid_argument("clustering needs more replicas than batches");
  const int anchor_x = 1;
  const int row = config.box_side / 2;
  for (const int d : config.pair_distances) {
    if (d < 0 || anchor_x + d > config.box_side - 2)
      throw std::invalid_argument("pair distance does not fit the box");
  }
  const int strip_anchor = 3;
  for (const int d : config.strip_distances) {
    if (d < 1 || strip_anchor + d > config.strip_width - 4)
      throw std::invalid_argument("strip distance does not fit the strip");
  }

  ClusteringReport report;
  report.config = config;

  // Empirical leg: presence covariances from perfect samples on the box.
  const CriticalPoints box_tilt = critical_points(BranchingSpec::planar(config.beta, config.n_max));
  const double box_m2 = box_tilt.a_bar;
  const double box_m3 = std::log(box_tilt.b_bar);

  const Box box = Box::square(config.box_side);
  const WeightedCatalog catalog = build_catalog_inside(config.beta, config.n_max, box);
  const Contour f_square = unit_square(anchor_x, row);
  std::vector<Contour> g_squares;
  for (const int d : config.pair_distances) g_squares.push_back(unit_square(anchor_x + d, row));

  const std::size_t npairs = config.pair_distances.size();
  const int nb = config.batches;
  std::vector<double> batch_n(nb, 0.0), batch_f(nb, 0.0);
  std::vector<std::vector<double>> batch_g(npairs, std::vector<double>(nb, 0.0));
  std::vector<std::vector<double>> batch_fg(npairs, std::vector<double>(nb, 0.0));

  for (int r = 0; r < config.replicas; ++r) {
    Rng rng(derive_seed(config.seed, kTagClustering, std::uint64_t(r)));
    const std::vector<Contour> sample = sample_window(catalog, rng);
    const int b = int(std::int64_t(r) * nb / config.replicas);
    batch_n[b] += 1.0;
    const bool f_on = std::binary_search(sample.begin(), sample.end(), f_square);
    if (f_on) batch_f[b] += 1.0;
    for (std::size_t k = 0; k < npairs; ++k) {
      const bool g_on = std::binary_search(sample.begin(), sample.end(), g_squares[k]);
      if (g_on) batch_g[k][b] += 1.0;
      if (f_on && g_on) batch_fg[k][b] += 1.0;
    }
  }

  for (std::size_t k = 0; k < npairs; ++k) {
    double nf = 0.0, ng = 0.0, nfg = 0.0;
    RunningMoments batch_cov;
    for (int b = 0; b < nb; ++b) {
      nf += batch_f[b];
      ng += batch_g[k][b];
      nfg += batch_fg[k][b];
      const double bn = batch_n[b];
      if (bn > 0.0)
        batch_cov.push(batch_fg[k][b] / bn - (batch_f[b] / bn) * (batch_g[k][b] / bn));
    }
    const double n = double(config.replicas);
    CovariancePoint point;
    point.distance = config.pair_distances[k];
    point.covariance = nfg / n - (nf / n) * (ng / n);
    point.standard_error = batch_cov.standard_error();
    point.envelope = pair_envelope(f_square, g_squares[k], box_m2, box_m3);
    point.within = std::abs(point.covariance) <= point.envelope;
    report.empirical.push_back(point);
  }

  // Exact leg: the same covariance on a height-one strip, where the measure
  // enumerates and the decay curve carries no sampling noise.
  const Box strip{0, 0, config.strip_width, 1};
  const ExactMeasure strip_measure = measure(strip, config.beta, config.strip_n_max);
  const CriticalPoints strip_tilt =
      critical_points(BranchingSpec::planar(config.beta, config.strip_n_max));
  const double strip_m2 = strip_tilt.a_bar;
  const double strip_m3 = std::log(strip_tilt.b_bar);
  report.reference_rate = strip_m3;

  const Contour strip_f = unit_square(strip_anchor, 0);
  const double ef = presence_probability(strip_measure, strip_f);
  std::vector<double> xs, ys;
  for (const int d : config.strip_distances) {
    const Contour strip_g = unit_square(strip_anchor + d, 0);
    const double eg = presence_probability(strip_measure, strip_g);
    const auto& entries = strip_measure.support.entries();
    std::uint32_t fi = 0, gi = 0;
    for (std::uint32_t i = 0; i < entries.size(); ++i) {
      if (entries[i].contour == strip_f) fi = i;
      if (entries[i].contour == strip_g) gi = i;
    }
    const double efg = expectation(strip_measure, [fi, gi](const Configuration& c) {
      return std::binary_search(c.begin(), c.end(), fi) &&
                     std::binary_search(c.begin(), c.end(), gi)
                 ? 1.0
                 : 0.0;
    });
    CovariancePoint point;
    point.distance = d;
    point.covariance = efg - ef * eg;
    point.envelope = pair_envelope(strip_f, strip_g, strip_m2, strip_m3);
    point.within = std::abs(point.covariance) <= point.envelope;
    report.exact_strip.push_back(point);
    if (std::abs(point.covariance) > 1e-20) {
      xs.push_back(d);
      ys.push_back(std::log(std::abs(point.covariance)));
    }
  }

  report.all_within = true;
  for (const auto& p : report.empirical) report.all_within = report.all_within && p.within;
  for (const auto& p : report.exact_strip) report.all_within = report.all_within && p.within;

  if (xs.size() >= 2) {
    const LineFit fit = fit_line(xs, ys);
    report.fit_present = true;
    report.fitted_rate = -fit.slope;
    report.fitted_rate_se = fit.slope_se;
    report.rate_dominates = report.fitted_rate >= report.reference_rate - config.rate_slack;
  }
  return report;
}

CltReport run_clt(const CltConfig& config) {
  if (config.replicas < 2) throw std::invalid_argument("block sums need at least two replicas");
  if (config.truncation_radius < 1 || 2 * config.truncation_radius >= config.block_side)
    throw std::invalid_argument("truncation radius does not fit the block");
  if (config.margin < 0) throw std::invalid_argument("margin must be nonnegative");

  const int window_side = config.block_side + 2 * config.margin;
  const Box window = Box::square(window_side);
  const WeightedCatalog catalog = build_catalog_inside(config.beta, config.n_max, window);

  const int L = config.block_side;
  const int lo = config.margin;
  const int doubled = 2 * config.truncation_radius;

  // Covered plaquettes are pooled into a per-vertex field (both orientations
  // based at the vertex), so offset statistics live on vertex displacements.
  std::map<std::pair<int, int>, std::uint64_t> pair_counts;
  std::vector<double> block_counts(config.replicas, 0.0);
  std::uint64_t total_covered = 0;

  std::vector<std::array<int, 2>> covered;
  for (int r = 0; r < config.replicas; ++r) {
    Rng rng(derive_seed(config.seed, kTagClt, std::uint64_t(r)));
    const std::vector<Contour> sample = sample_window(catalog, rng);
    covered.clear();
    for (const auto& contour : sample) {
      for (const auto& p : contour.edges()) {
        if (p.x >= lo && p.x < lo + L && p.y >= lo && p.y < lo + L)
          covered.push_back({p.x, p.y});
      }
    }
    block_counts[r] = double(covered.size());
    total_covered += covered.size();
    for (const auto& a : covered) {
      for (const auto& b : covered) {
        const int dx = b[0] - a[0];
        const int dy = b[1] - a[1];
        if (std::abs(dx) <= doubled && std::abs(dy) <= doubled) ++pair_counts[{dx, dy}];
      }
    }
  }

  CltReport report;
  report.config = config;
  const double positions = double(L) * L;
  const double mean = double(total_covered) / (config.replicas * positions);
  report.observable_mean = mean;

  const auto truncated_cov_sum = [&](int radius) {
    double sum = 0.0;
    for (int dx = -radius; dx <= radius; ++dx) {
      for (int dy = -radius; dy <= radius; ++dy) {
        const double offset_positions = double(L - std::abs(dx)) * (L - std::abs(dy));
        const auto it = pair_counts.find({dx, dy});
        const double second_moment =
            it == pair_counts.end() ? 0.0 : double(it->second) / (config.replicas * offset_positions);
        sum += second_moment - mean * mean;
      }
    }
    return sum;
  };
  report.d_hat = truncated_cov_sum(config.truncation_radius);
  report.d_hat_doubled = truncated_cov_sum(doubled);

  if (report.d_hat <= 0.0) {
    report.degenerate_variance = true;
    return report;
  }
  report.d_hat_relative_change = std::abs(report.d_hat_doubled - report.d_hat) / report.d_hat;
  report.d_hat_stable = report.d_hat_relative_change < config.stability_tolerance;

  report.standardized.resize(config.replicas);
  const double scale = std::sqrt(positions * report.d_hat);
  for (int r = 0; r < config.replicas; ++r)
    report.standardized[r] = (block_counts[r] - positions * mean) / scale;
  report.ks_distance = ks_distance_normal(report.standardized, 0.0, 1.0);
  report.ks_within = report.ks_distance <= config.ks_tolerance;
  return report;
}

PoissonReport run_poisson(const PoissonConfig& config) {
  const std::size_t grid = config.beta_grid.size();
  if (grid == 0 || config.target_means.size() != grid || config.replicas.size() != grid)
    throw std::invalid_argument("beta grid, target means and replicas must align");
  if (config.blocks_per_side < 2)
    throw std::invalid_argument("need at least a 2x2 block grid for corner counts");
  if (config.contour_size < 4 || config.contour_size % 2 != 0 ||
      config.contour_size > config.n_max)
    throw std::invalid_argument("counted contour size must be even and within n_max");

  PoissonReport report;
  report.config = config;

  for (std::size_t bi = 0; bi < grid; ++bi) {
    const double beta = config.beta_grid[bi];
    const int reps = config.replicas[bi];
    if (reps < 2) throw std::invalid_argument("each beta needs at least two replicas");

    PoissonBetaReport entry;
    entry.beta = beta;
    entry.replicas = reps;
    entry.rescale_factor = std::exp(beta * config.contour_size);

    int side = int(std::lround(std::sqrt(config.target_means[bi] * entry.rescale_factor)));
    side = std::min(side, config.max_window_side);
    side -= side % config.blocks_per_side;
    if (side < config.blocks_per_side)
      throw std::invalid_argument("window collapses; raise the target mean");
    entry.window_side = side;

    const Box window = Box::square(side);
    const WeightedCatalog catalog = build_catalog_inside(beta, config.n_max, window);
    const int blocks = config.blocks_per_side;
    const int block_cells = side / blocks;
    const int nblocks = blocks * blocks;

    std::vector<double> all_counts;
    all_counts.reserve(std::size_t(reps) * nblocks);
    std::vector<double> first_corner(reps, 0.0), last_corner(reps, 0.0);
    std::vector<std::vector<std::pair<int, int>>> cells_by_replica(reps);

    for (int r = 0; r < reps; ++r) {
      Rng rng(derive_seed(config.seed, kTagPoisson * 1000 + bi, std::uint64_t(r)));
      const std::vector<Contour> sample = sample_window(catalog, rng);
      std::vector<int> counts(nblocks, 0);
      auto& cells = cells_by_replica[r];
      for (const auto& contour : sample) {
        if (int(contour.size()) != config.contour_size) continue;
        const Plaquette base = contour.anchor();
        cells.emplace_back(base.x, base.y);
        const int bx = base.x / block_cells;
        const int by = base.y / block_cells;
        ++counts[by * blocks + bx];
      }
      entry.observed += cells.size();
      for (int i = 0; i < nblocks; ++i) all_counts.push_back(counts[i]);
      first_corner[r] = counts[0];
      last_corner[r] = counts[nblocks - 1];
    }

    entry.intensity =
        double(entry.observed) * entry.rescale_factor / (double(reps) * side * side);

    RunningMoments block_moments;
    for (const double c : all_counts) block_moments.push(c);
    entry.block_mean = block_moments.mean();
    if (entry.block_mean > 0.0) {
      entry.block_dispersion = block_moments.variance() / entry.block_mean;

      // Nonparametric batch standard error over replica-contiguous batches.
      const int nbatches = std::min(30, reps);
      RunningMoments batch_ratios;
      for (int b = 0; b < nbatches; ++b) {
        const int r_lo = int(std::int64_t(b) * reps / nbatches);
        const int r_hi = int(std::int64_t(b + 1) * reps / nbatches);
        RunningMoments one;
        for (int r = r_lo; r < r_hi; ++r)
          for (int i = 0; i < nblocks; ++i) one.push(all_counts[std::size_t(r) * nblocks + i]);
        if (one.mean() > 0.0) batch_ratios.push(one.variance() / one.mean());
      }
      if (batch_ratios.count() >= 2) entry.dispersion_se = batch_ratios.standard_error();
    }

    entry.gated = entry.observed >= config.min_observed_for_gates;
    entry.dispersion_within = entry.block_mean > 0.0 &&
                              std::abs(entry.block_dispersion - 1.0) <= config.dispersion_tolerance;

    // Correlation between the two corner blocks, replica by replica.
    RunningMoments mf, ml;
    for (int r = 0; r < reps; ++r) {
      mf.push(first_corner[r]);
      ml.push(last_corner[r]);
    }
    if (mf.variance() > 0.0 && ml.variance() > 0.0) {
      double cross = 0.0;
      for (int r = 0; r < reps; ++r)
        cross += (first_corner[r] - mf.mean()) * (last_corner[r] - ml.mean());
      cross /= double(reps) - 1.0;
      entry.corner_correlation = cross / (mf.stddev() * ml.stddev());
    }
    entry.correlation_within =
        std::abs(entry.corner_correlation) <= config.correlation_tolerance;

    // Nearest-neighbour diagnostic: under the Poisson picture the transformed
    // distance pi * density * d^2 is Exp(1) up to window-edge effects.
    const double density = double(entry.observed) / (double(reps) * side * side);
    std::vector<double> transformed;
    for (const auto& cells : cells_by_replica) {
      if (cells.size() < 2) continue;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        double best = std::numeric_limits<double>::max();
        for (std::size_t j = 0; j < cells.size(); ++j) {
          if (i == j) continue;
          const double dx = cells[i].first - cells[j].first;
          const double dy = cells[i].second - cells[j].second;
          best = std::min(best, dx * dx + dy * dy);
        }
        transformed.push_back(3.14159265358979323846 * density * best);
      }
    }
    entry.nn_count = transformed.size();
    if (transformed.size() >= 50) {
      std::sort(transformed.begin(), transformed.end());
      double dist = 0.0;
      const double n = double(transformed.size());
      for (std::size_t i = 0; i < transformed.size(); ++i) {
        const double cdf = -std::expm1(-transformed[i]);
        dist = std::max(dist, std::abs(double(i + 1) / n - cdf));
        dist = std::max(dist, std::abs(cdf - double(i) / n));
      }
      entry.nn_ks = dist;
    }

    report.per_beta.push_back(std::move(entry));
  }

  report.dispersion_ok = true;
  report.correlation_ok = true;
  for (const auto& entry : report.per_beta) {
    if (!entry.gated) continue;
    report.dispersion_ok = report.dispersion_ok && entry.dispersion_within;
    report.correlation_ok = report.correlation_ok && entry.correlation_within;
  }

  report.trend_consistent = true;
  for (std::size_t i = 1; i < report.per_beta.size(); ++i) {
    const auto& prev = report.per_beta[i - 1];
    const auto& cur = report.per_beta[i];
    if (prev.block_mean <= 0.0 || cur.block_mean <= 0.0) continue;
    const double band = 2.0 * (prev.dispersion_se + cur.dispersion_se);
    if (std::abs(cur.block_dispersion - 1.0) >
        std::abs(prev.block_dispersion - 1.0) + band)
      report.trend_consistent = false;
  }
  return report;
}

ClanTailsReport run_clan_tails(const ClanTailsConfig& config) {
  const std::size_t grid = config.beta_grid.size();
  if (grid == 0 || config.replicas.size() != grid)
    throw std::invalid_argument("beta grid and replicas must align");
  if (config.box_half_width < 4)
    throw std::invalid_argument("free-process truncation box is too small");

  ClanTailsReport report;
  report.config = config;

  const std::vector<SpaceTimePoint> targets{{Plaquette{0, 0, 0}, 0.0}};
  const Box region =
      Box::square(2 * config.box_half_width + 1, -config.box_half_width, -config.box_half_width);

  for (std::size_t bi = 0; bi < grid; ++bi) {
    const double beta = config.beta_grid[bi];
    const int reps = config.replicas[bi];
    ClanTailsBetaReport entry;
    entry.beta = beta;
    entry.replicas = reps;

    const WeightedCatalog catalog = build_catalog(beta, config.n_max, region);
    Rng clan_rng(derive_seed(config.seed, kTagClanTails * 1000 + 2 * bi));
    const ClanStatsBatch batch = clan_stats(targets, catalog, reps, clan_rng);
    const std::size_t n = batch.samples.size();
    if (n == 0) throw std::logic_error("every clan replica hit the growth cap");

    const BranchingSpec spec = BranchingSpec::planar(beta, config.n_max);
    const CriticalPoints tilt = critical_points(spec);
    const double m2 = tilt.a_bar;
    const double m3 = std::log(tilt.b_bar);
    entry.time_reference = 1.0 - spec.mean_offspring();

    std::uint64_t max_width = 0;
    for (const auto& s : batch.samples) {
      if (s.cumulative_size > 0) ++entry.nonempty;
      entry.max_size = std::max(entry.max_size, s.cumulative_size);
      max_width = std::max(max_width, std::uint64_t(s.projection_width));
    }
    entry.p_nonempty = double(entry.nonempty) / double(n);

    const auto integer_tail = [&](auto value_of, std::uint64_t max_value) {
      std::vector<TailCurvePoint> curve;
      for (std::uint64_t k = 0; k < max_value; ++k) {
        std::uint64_t exceed = 0;
        for (const auto& s : batch.samples)
          if (value_of(s) > k) ++exceed;
        TailCurvePoint point;
        point.threshold = double(k);
        point.survival = double(exceed) / double(n);
        point.envelope = m2 * std::exp(-m3 * double(k));
        point.within = point.survival <= point.envelope;
        curve.push_back(point);
      }
      return curve;
    };
    entry.size_tail =
        integer_tail([](const ClanStats& s) { return s.cumulative_size; }, entry.max_size);
    entry.width_tail = integer_tail(
        [](const ClanStats& s) { return std::uint64_t(s.projection_width); }, max_width);
    entry.size_within = std::all_of(entry.size_tail.begin(), entry.size_tail.end(),
                                    [](const TailCurvePoint& p) { return p.within; });
    entry.width_within = std::all_of(entry.width_tail.begin(), entry.width_tail.end(),
                                     [](const TailCurvePoint& p) { return p.within; });

    // Time-length tail: pooled survival counts on a fixed grid, log-linear fit
    // while each grid point keeps at least min_fit_count exceedances.
    {
      std::vector<double> xs, ys;
      for (int i = 0;; ++i) {
        const double t = i * config.time_grid_step;
        std::uint64_t exceed = 0;
        for (const auto& s : batch.samples)
          if (s.time_length > t) ++exceed;
        if (exceed < std::uint64_t(config.min_fit_count)) break;
        xs.push_back(t);
        ys.push_back(std::log(double(exceed) / double(n)));
      }
      if (int(xs.size()) >= config.min_fit_points) {
        const LineFit fit = fit_line(xs, ys);
        entry.time_fit_present = true;
        entry.time_rate = -fit.slope;
        entry.time_rate_se = fit.slope_se;
        entry.time_rate_dominates =
            entry.time_rate >= entry.time_reference - config.rate_slack;
      }
    }

    // Domination leg: total progeny of the single-type walk must stochastically
    // dominate the clan's plaquette count.
    {
      Rng gw_rng(derive_seed(config.seed, kTagClanTails * 1000 + 2 * bi + 1));
      std::vector<std::uint64_t> progeny(config.gw_replicas);
      std::uint64_t max_k = entry.max_size;
      for (int g = 0; g < config.gw_replicas; ++g) {
        progeny[g] = simulate_gw(spec, gw_rng).progeny;
        max_k = std::max(max_k, progeny[g]);
      }
      const double nz = double(config.gw_replicas);
      for (std::uint64_t k = 0; k < entry.max_size; ++k) {
        std::uint64_t clan_exceed = 0;
        for (const auto& s : batch.samples)
          if (s.cumulative_size > k) ++clan_exceed;
        std::uint64_t gw_exceed = 0;
        for (const auto& z : progeny)
          if (z > k) ++gw_exceed;
        const double pa = double(clan_exceed) / double(n);
        const double pz = double(gw_exceed) / nz;
        const double se =
            std::sqrt(pa * (1.0 - pa) / double(n) + pz * (1.0 - pz) / nz);
        if (pa > pz + 4.0 * se) ++entry.domination_violations;
      }
    }

    report.per_beta.push_back(std::move(entry));
  }

  report.steepens = report.per_beta.size() >= 2;
  for (std::size_t i = 1; i < report.per_beta.size(); ++i) {
    if (report.per_beta[i].p_nonempty >= report.per_beta[i - 1].p_nonempty)
      report.steepens = false;
  }
  return report;
}

}  // namespace loopgas
