#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace loopgas {

// Reproduction studies over the samplers and the exact measure. Every run_*
// function is a pure function of its config struct: all randomness derives
// from the embedded seed, so equal configs produce member-identical reports.
// Reference constants (the coupling rate, the tilt pair, the time exponent)
// are recomputed from the branching formulas at the config's own beta and
// n_max; nothing numeric is pinned in this module.

// --- Relaxation of the coupled forward dynamics -----------------------------

struct ConvergenceConfig {
  double beta = 2.0;
  int n_max = 10;
  int box_side = 6;  // cells
  double t_end = 12.0;
  double grid_step = 0.5;
  int replicas = 1000;
  double rate_slack = 0.05;
  std::uint64_t seed = 20240801;

  friend bool operator==(const ConvergenceConfig&, const ConvergenceConfig&) = default;
};

struct ConvergenceReport {
  ConvergenceConfig config;
  // The "full" end of the sandwich: a greedy maximal packing of the box.
  std::size_t full_start_size = 0;
  std::vector<double> times;
  std::vector<double> mean_discrepancy;
  double coalesced_fraction = 0.0;
  double mean_coalescence_time = 0.0;  // over coalesced replicas only
  bool fit_present = false;
  double fitted_rate = 0.0;  // minus the log-linear slope of the mean curve
  double fitted_rate_se = 0.0;
  double reference_rate = 0.0;  // (1-m)/(2-m) at the config's parameters
  bool rate_dominates = false;  // fitted_rate >= reference_rate - rate_slack

  friend bool operator==(const ConvergenceReport&, const ConvergenceReport&) = default;
};

ConvergenceReport run_convergence(const ConvergenceConfig& config);

// --- Finite-volume effect on a local observable -----------------------------

// Exact comparison of nested volumes: P(center square present) in a strip of
// the given height and growing width, against the widest strip as reference.
// Strips keep the configuration count enumerable while the width, the only
// direction the bound varies in, still spans several decades of gap.
struct VolumeEffectConfig {
  double beta = 2.0;
  int n_max = 4;
  int strip_height = 3;  // cells
  std::vector<int> half_widths = {1, 2, 3};
  int reference_half_width = 5;
  double rate_slack = 0.1;

  friend bool operator==(const VolumeEffectConfig&, const VolumeEffectConfig&) = default;
};

struct VolumeGap {
  int half_width = 0;
  double inner_value = 0.0;  // P(center square present) in the inner strip
  double gap = 0.0;          // |inner - reference|
  double bound = 0.0;        // m2 * sum over support plaquettes of e^{-m3 d(x, complement)}
  bool within = false;

  friend bool operator==(const VolumeGap&, const VolumeGap&) = default;
};

struct VolumeEffectReport {
  VolumeEffectConfig config;
  double reference_value = 0.0;
  std::vector<VolumeGap> gaps;
  bool all_within = false;
  bool monotone = false;  // gaps nonincreasing in the half-width
  bool fit_present = false;
  double fitted_rate = 0.0;  // decay per unit half-width
  double fitted_rate_se = 0.0;
  double reference_rate = 0.0;  // m3 at the config's parameters
  bool rate_dominates = false;

  friend bool operator==(const VolumeEffectReport&, const VolumeEffectReport&) = default;
};

VolumeEffectReport run_volume_effect(const VolumeEffectConfig& config);

// --- Spatial clustering of presence indicators ------------------------------

// Two legs. Empirical: perfect samples on a box wide against the correlation
// length, covariance of two square-presence indicators at each listed
// distance, tested against the pair envelope. Exact: the same covariance on a
// height-one strip where the measure enumerates, giving a noise-free decay
// curve for the rate fit.
struct ClusteringConfig {
  double beta = 2.0;
  int n_max = 6;
  int box_side = 14;  // cells
  int replicas = 30000;
  int batches = 30;
  std::vector<int> pair_distances = {0, 1, 2, 10};
  int strip_width = 16;  // cells
  int strip_n_max = 4;
  std::vector<int> strip_distances = {1, 2, 3, 4};
  double rate_slack = 0.1;
  std::uint64_t seed = 20240801;

  friend bool operator==(const ClusteringConfig&, const ClusteringConfig&) = default;
};

struct CovariancePoint {
  int distance = 0;
  double covariance = 0.0;
  double standard_error = 0.0;  // zero for exact points
  double envelope = 0.0;
  bool within = false;

  friend bool operator==(const CovariancePoint&, const CovariancePoint&) = default;
};

struct ClusteringReport {
  ClusteringConfig config;
  std::vector<CovariancePoint> empirical;
  std::vector<CovariancePoint> exact_strip;
  bool all_within = false;
  bool fit_present = false;
  double fitted_rate = 0.0;  // decay per cell along the strip
  double fitted_rate_se = 0.0;
  double reference_rate = 0.0;  // m3 of the strip model
  bool rate_dominates = false;

  friend bool operator==(const ClusteringReport&, const ClusteringReport&) = default;
};

ClusteringReport run_clustering(const ClusteringConfig& config);

// --- Block-sum central limit behaviour --------------------------------------

// Observable: number of covered plaquettes based at each vertex of the block.
// The block sum is standardized by the truncated covariance sum d_hat and
// compared to a standard normal by Kolmogorov-Smirnov distance. Samples come
// from a window padded by `margin` cells so contours may straddle the block
// boundary the way they would inside a larger volume.
struct CltConfig {
  double beta = 1.5;
  int n_max = 8;
  int block_side = 32;  // cells
  int margin = 3;
  int replicas = 1000;
  int truncation_radius = 3;
  double ks_tolerance = 0.05;
  double stability_tolerance = 0.05;
  std::uint64_t seed = 20240801;

  friend bool operator==(const CltConfig&, const CltConfig&) = default;
};

struct CltReport {
  CltConfig config;
  double observable_mean = 0.0;  // per-vertex covered-plaquette density
  double d_hat = 0.0;
  double d_hat_doubled = 0.0;  // recomputed at twice the truncation radius
  double d_hat_relative_change = 0.0;
  bool d_hat_stable = false;
  // d_hat <= 0: the normalization is meaningless, ks_distance stays -1 and
  // standardized stays empty.
  bool degenerate_variance = false;
  double ks_distance = -1.0;
  bool ks_within = false;
  std::vector<double> standardized;

  friend bool operator==(const CltReport&, const CltReport&) = default;
};

CltReport run_clt(const CltConfig& config);

// --- Poisson character of the sparse regime ---------------------------------

// Counts of size-j contours in windows whose area tracks the inverse density
// e^{beta j}, cut into a grid of equal blocks. Per-block dispersion, the
// correlation between the two corner blocks, and pooled nearest-neighbour
// distances probe the three Poisson signatures. Entries of beta_grid,
// target_means and replicas line up index by index.
struct PoissonConfig {
  std::vector<double> beta_grid = {2.0, 2.5, 3.0};
  std::vector<double> target_means = {8.0, 8.0, 4.0};  // expected contours per window
  std::vector<int> replicas = {500, 2000, 250};
  int contour_size = 4;
  int n_max = 4;
  int blocks_per_side = 3;
  int max_window_side = 1200;
  double dispersion_tolerance = 0.1;
  double correlation_tolerance = 0.05;
  std::uint64_t min_observed_for_gates = 1000;
  std::uint64_t seed = 20240801;

  friend bool operator==(const PoissonConfig&, const PoissonConfig&) = default;
};

struct PoissonBetaReport {
  double beta = 0.0;
  int window_side = 0;  // cells, divisible by blocks_per_side
  int replicas = 0;
  std::uint64_t observed = 0;    // size-j contours over all replicas
  double rescale_factor = 0.0;   // e^{beta j}
  double intensity = 0.0;        // mean count per unit rescaled volume
  double block_mean = 0.0;
  double block_dispersion = 0.0;  // variance / mean over all blocks
  double dispersion_se = 0.0;     // batch standard error
  bool gated = false;             // observed reached min_observed_for_gates
  bool dispersion_within = false;
  double corner_correlation = 0.0;
  bool correlation_within = false;
  double nn_ks = -1.0;  // diagnostic only; -1 without enough pairs
  std::uint64_t nn_count = 0;

  friend bool operator==(const PoissonBetaReport&, const PoissonBetaReport&) = default;
};

struct PoissonReport {
  PoissonConfig config;
  std::vector<PoissonBetaReport> per_beta;
  bool dispersion_ok = false;   // every gated beta within tolerance
  bool correlation_ok = false;  // same for the corner correlation
  // Dispersion deviations do not degrade along the grid beyond twice their
  // combined standard errors; the desk-scale stand-in for the limit statement.
  bool trend_consistent = false;

  friend bool operator==(const PoissonReport&, const PoissonReport&) = default;
};

PoissonReport run_poisson(const PoissonConfig& config);

// --- Clan tail studies ------------------------------------------------------

// Clans of the single space-time point (origin plaquette, time 0), per grid
// beta: tail curves for the total plaquette count and the spatial projection
// against the m2 e^{-m3 k} envelope, a log-survival rate fit for the time
// length against the time exponent, and a one-sided CDF comparison of the
// count against total progeny of the dominating walk. Entries of beta_grid
// and replicas line up index by index.
struct ClanTailsConfig {
  std::vector<double> beta_grid = {1.5, 2.0};
  std::vector<int> replicas = {20000, 100000};
  int n_max = 8;
  int box_half_width = 16;  // truncation radius of the free process, cells
  int gw_replicas = 20000;  // per beta
  double rate_slack = 0.1;
  double time_grid_step = 0.25;
  int min_fit_count = 20;  // pooled tail events per retained grid point
  int min_fit_points = 4;
  std::uint64_t seed = 20240801;

  friend bool operator==(const ClanTailsConfig&, const ClanTailsConfig&) = default;
};

struct TailCurvePoint {
  double threshold = 0.0;
  double survival = 0.0;
  double envelope = 0.0;
  bool within = false;

  friend bool operator==(const TailCurvePoint&, const TailCurvePoint&) = default;
};

struct ClanTailsBetaReport {
  double beta = 0.0;
  int replicas = 0;
  std::uint64_t nonempty = 0;
  double p_nonempty = 0.0;
  std::uint64_t max_size = 0;
  std::vector<TailCurvePoint> size_tail;
  std::vector<TailCurvePoint> width_tail;
  bool size_within = false;
  bool width_within = false;
  bool time_fit_present = false;
  double time_rate = 0.0;
  double time_rate_se = 0.0;
  double time_reference = 0.0;  // 1 - (d-1) * activity
  bool time_rate_dominates = false;
  // One-sided domination of the walk's total progeny over the clan count:
  // grid points where the clan survival exceeds the walk survival by more
  // than four combined standard errors.
  std::uint64_t domination_violations = 0;

  friend bool operator==(const ClanTailsBetaReport&, const ClanTailsBetaReport&) = default;
};

struct ClanTailsReport {
  ClanTailsConfig config;
  std::vector<ClanTailsBetaReport> per_beta;
  bool steepens = false;  // p_nonempty strictly decreasing along the grid

  friend bool operator==(const ClanTailsReport&, const ClanTailsReport&) = default;
};

ClanTailsReport run_clan_tails(const ClanTailsConfig& config);

}  // namespace loopgas
