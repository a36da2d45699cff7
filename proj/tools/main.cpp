// Command-line front end: analytic bounds, catalog enumeration, the exact
// finite-volume measure, forward and perfect samplers, clan sweeps, and the
// r2..r6 replication studies.  Every run is a pure function of its flags,
// settings file, and seed; rerunning a command reproduces its output byte for
// byte.  Replication subcommands exit nonzero when their acceptance gate
// fails, so they can sit directly in CI pipelines.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "loopgas/branching.hpp"
#include "loopgas/catalog.hpp"
#include "loopgas/clan.hpp"
#include "loopgas/config.hpp"
#include "loopgas/experiments.hpp"
#include "loopgas/forward.hpp"
#include "loopgas/lattice.hpp"
#include "loopgas/oracle.hpp"
#include "loopgas/region.hpp"
#include "loopgas/rng.hpp"

namespace loopgas {
namespace {

using nlohmann::json;

// Seed stream tags for the sampling subcommands; the experiment runners carry
// their own tags internally.
constexpr std::uint64_t kCliForwardTag = 0xF1;
constexpr std::uint64_t kCliPerfectTag = 0xF2;
constexpr std::uint64_t kCliClanTag = 0xF3;

struct GlobalArgs {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config_path;
  std::optional<std::string> out_base;
};

Settings load_settings(const GlobalArgs& args) {
  return args.config_path ? parse_settings_file(*args.config_path) : Settings{};
}

// Streams for one run: JSON-lines always, CSV only when --out is given.
struct Outputs {
  std::ofstream jsonl_file;
  std::ofstream csv_file;
  std::ostream* jsonl = nullptr;
  bool has_csv = false;

  explicit Outputs(const GlobalArgs& args, bool want_csv = false) {
    if (args.out_base) {
      jsonl_file.open(*args.out_base + ".jsonl");
      if (!jsonl_file) throw std::runtime_error("cannot write '" + *args.out_base + ".jsonl'");
      jsonl = &jsonl_file;
      if (want_csv) {
        csv_file.open(*args.out_base + ".csv");
        if (!csv_file) throw std::runtime_error("cannot write '" + *args.out_base + ".csv'");
        csv_file << std::setprecision(17);
        has_csv = true;
      }
    } else {
      jsonl = &std::cout;
    }
  }

  void line(const json& record) { *jsonl << record.dump() << "\n"; }
  std::ostream& csv() { return csv_file; }
};

std::string kind_name(TrajectoryEvent::Kind kind) {
  switch (kind) {
    case TrajectoryEvent::Kind::kept: return "kept";
    case TrajectoryEvent::Kind::erased: return "erased";
    case TrajectoryEvent::Kind::death: return "death";
  }
  return "unknown";
}

json contour_list(const std::vector<Contour>& contours) {
  json out = json::array();
  for (const auto& c : contours) out.push_back(to_string(c));
  return out;
}

// ---------------------------------------------------------------------------
// bounds: the analytic record everything else consumes.

int run_bounds_cmd(double beta, int n_max, const GlobalArgs& args) {
  const LambdaResult lambda = lambda_beta(beta, n_max);
  const BetaThreshold threshold = beta_M(2, n_max);
  json record{{"record", "bounds"},
              {"beta", beta},
              {"d", 2},
              {"n_max", n_max},
              {"lambda", lambda.value},
              {"tail", lambda.tail_bound},
              {"certified", lambda.certified},
              {"beta_M_lo", threshold.lower},
              {"beta_M_hi", threshold.upper}};
  if (beta > threshold.upper) {
    const BranchingSpec spec = BranchingSpec::planar(beta, n_max);
    const CriticalPoints tilt = critical_points(spec);
    const double m = spec.mean_offspring();
    record["a_bar"] = tilt.a_bar;
    record["b_bar"] = tilt.b_bar;
    record["M2"] = tilt.a_bar;
    record["M3"] = std::log(tilt.b_bar);
    record["time_exponent"] = 1.0 - m;
    record["M0"] = (1.0 - m) / (2.0 - m);
  } else {
    for (const char* key : {"a_bar", "b_bar", "M2", "M3", "time_exponent", "M0"})
      record[key] = nullptr;
  }
  Outputs out(args);
  out.line(record);
  return 0;
}

// ---------------------------------------------------------------------------
// enumerate: catalog counts and weights, optionally listing every entry.

int run_enumerate_cmd(double beta, int n_max, std::optional<int> box_side, bool list_entries,
                      const GlobalArgs& args) {
  Outputs out(args);
  if (!box_side) {
    const auto counts = activity_counts(n_max);
    json sizes = json::object();
    for (const auto& [size, count] : counts) sizes[std::to_string(size)] = count;
    const LambdaResult lambda = lambda_beta(beta, n_max);
    out.line(json{{"record", "activity"},
                  {"beta", beta},
                  {"n_max", n_max},
                  {"counts_per_plaquette", sizes},
                  {"lambda", lambda.value},
                  {"tail", lambda.tail_bound},
                  {"certified", lambda.certified}});
    return 0;
  }
  const Box box = Box::square(*box_side);
  const WeightedCatalog catalog = build_catalog_inside(beta, n_max, box);
  json sizes = json::object();
  for (const auto& [size, count] : catalog.counts_by_size()) sizes[std::to_string(size)] = count;
  out.line(json{{"record", "catalog"},
                {"beta", beta},
                {"n_max", n_max},
                {"box", *box_side},
                {"entries", catalog.entries().size()},
                {"counts_by_size", sizes},
                {"total_weight", catalog.total_weight()},
                {"tail", catalog.tail_bound()},
                {"certified", catalog.tail_certified()}});
  if (list_entries) {
    for (std::size_t i = 0; i < catalog.entries().size(); ++i) {
      const CatalogEntry& entry = catalog.entries()[i];
      out.line(json{{"record", "entry"},
                    {"index", i},
                    {"contour", to_string(entry.contour)},
                    {"size", entry.contour.size()},
                    {"weight", entry.weight}});
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// oracle: the exact measure on a small window, enumerated in full.

int run_oracle_cmd(double beta, int box_side, int n_max, const GlobalArgs& args) {
  const ExactMeasure m = measure(Box::square(box_side), beta, n_max);
  Outputs out(args);
  out.line(json{{"record", "measure"},
                {"beta", beta},
                {"box", box_side},
                {"n_max", n_max},
                {"support_size", m.support.entries().size()},
                {"configurations", m.configurations.size()},
                {"partition_function", m.partition_function}});
  for (std::size_t i = 0; i < m.support.entries().size(); ++i) {
    const CatalogEntry& entry = m.support.entries()[i];
    out.line(json{{"record", "contour"},
                  {"index", i},
                  {"contour", to_string(entry.contour)},
                  {"weight", entry.weight}});
  }
  for (std::size_t k = 0; k < m.configurations.size(); ++k) {
    out.line(json{{"record", "state"},
                  {"index", k},
                  {"probability", m.probabilities[k]},
                  {"contours", m.configurations[k]}});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sample-forward: mark-by-mark trajectories from the empty state.

int run_forward_cmd(double beta, int box_side, int n_max, double t_end, int replicas,
                    std::uint64_t seed, const GlobalArgs& args) {
  const Box box = Box::square(box_side);
  const WeightedCatalog catalog = build_catalog_inside(beta, n_max, box);
  Outputs out(args);
  out.line(json{{"record", "run"},
                {"sampler", "forward"},
                {"beta", beta},
                {"box", box_side},
                {"n_max", n_max},
                {"t_end", t_end},
                {"replicas", replicas},
                {"seed", seed}});
  for (int r = 0; r < replicas; ++r) {
    Rng rng(derive_seed(seed, kCliForwardTag, std::uint64_t(r)));
    const MarkStream marks = generate_marks(catalog, box, t_end, rng);
    const Trajectory trajectory = evolve({}, marks);
    for (const auto& event : trajectory.events) {
      out.line(json{{"record", "event"},
                    {"replica", r},
                    {"time", event.time},
                    {"kind", kind_name(event.kind)},
                    {"contour", to_string(event.basis)}});
    }
    out.line(json{{"record", "final"},
                  {"replica", r},
                  {"time", t_end},
                  {"contours", contour_list(trajectory.final_state)}});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sample-perfect: stationary window samples via the clan construction.

int run_perfect_cmd(double beta, int box_side, int n_max, int replicas, std::uint64_t seed,
                    const std::string& emit, const GlobalArgs& args) {
  const Box box = Box::square(box_side);
  const WeightedCatalog catalog = build_catalog_inside(beta, n_max, box);
  Outputs out(args);
  out.line(json{{"record", "run"},
                {"sampler", "perfect"},
                {"beta", beta},
                {"box", box_side},
                {"n_max", n_max},
                {"replicas", replicas},
                {"seed", seed},
                {"emit", emit}});
  std::uint64_t empty = 0;
  std::uint64_t total_contours = 0;
  for (int r = 0; r < replicas; ++r) {
    Rng rng(derive_seed(seed, kCliPerfectTag, std::uint64_t(r)));
    const std::vector<Contour> sample = sample_window(catalog, rng);
    total_contours += sample.size();
    if (sample.empty()) ++empty;
    if (emit == "config") {
      out.line(json{{"record", "sample"}, {"replica", r}, {"contours", contour_list(sample)}});
    } else {
      std::uint64_t plaquettes = 0;
      for (const auto& c : sample) plaquettes += c.size();
      out.line(json{{"record", "sample_stats"},
                    {"replica", r},
                    {"contour_count", sample.size()},
                    {"plaquette_count", plaquettes}});
    }
  }
  out.line(json{{"record", "summary"},
                {"replicas", replicas},
                {"empty_fraction", double(empty) / double(replicas)},
                {"mean_contour_count", double(total_contours) / double(replicas)}});
  return 0;
}

// ---------------------------------------------------------------------------
// Experiment reporting helpers.

json config_json(const ConvergenceConfig& c) {
  return json{{"beta", c.beta},         {"n_max", c.n_max},
              {"box_side", c.box_side}, {"t_end", c.t_end},
              {"grid_step", c.grid_step}, {"replicas", c.replicas},
              {"rate_slack", c.rate_slack}, {"seed", c.seed}};
}

json config_json(const VolumeEffectConfig& c) {
  return json{{"beta", c.beta},
              {"n_max", c.n_max},
              {"strip_height", c.strip_height},
              {"half_widths", c.half_widths},
              {"reference_half_width", c.reference_half_width},
              {"rate_slack", c.rate_slack}};
}

json config_json(const ClusteringConfig& c) {
  return json{{"beta", c.beta},
              {"n_max", c.n_max},
              {"box_side", c.box_side},
              {"replicas", c.replicas},
              {"batches", c.batches},
              {"pair_distances", c.pair_distances},
              {"strip_width", c.strip_width},
              {"strip_n_max", c.strip_n_max},
              {"strip_distances", c.strip_distances},
              {"rate_slack", c.rate_slack},
              {"seed", c.seed}};
}

json config_json(const CltConfig& c) {
  return json{{"beta", c.beta},
              {"n_max", c.n_max},
              {"block_side", c.block_side},
              {"margin", c.margin},
              {"replicas", c.replicas},
              {"truncation_radius", c.truncation_radius},
              {"ks_tolerance", c.ks_tolerance},
              {"stability_tolerance", c.stability_tolerance},
              {"seed", c.seed}};
}

json config_json(const PoissonConfig& c) {
  return json{{"beta_grid", c.beta_grid},
              {"target_means", c.target_means},
              {"replicas", c.replicas},
              {"contour_size", c.contour_size},
              {"n_max", c.n_max},
              {"blocks_per_side", c.blocks_per_side},
              {"max_window_side", c.max_window_side},
              {"dispersion_tolerance", c.dispersion_tolerance},
              {"correlation_tolerance", c.correlation_tolerance},
              {"min_observed_for_gates", c.min_observed_for_gates},
              {"seed", c.seed}};
}

json config_json(const ClanTailsConfig& c) {
  return json{{"beta_grid", c.beta_grid},
              {"replicas", c.replicas},
              {"n_max", c.n_max},
              {"box_half_width", c.box_half_width},
              {"gw_replicas", c.gw_replicas},
              {"rate_slack", c.rate_slack},
              {"time_grid_step", c.time_grid_step},
              {"min_fit_count", c.min_fit_count},
              {"min_fit_points", c.min_fit_points},
              {"seed", c.seed}};
}

Outputs experiment_outputs(const char* name, const GlobalArgs& args) {
  if (!args.out_base)
    throw std::runtime_error(std::string(name) + " requires --out PATH for its jsonl/csv outputs");
  return Outputs(args, true);
}

int finish(const char* name, bool pass, const std::string& headline) {
  std::cout << name << ": " << (pass ? "PASS" : "FAIL") << " " << headline << "\n";
  return pass ? 0 : 1;
}

std::string format_rate(double rate, double se) {
  std::ostringstream s;
  s << std::setprecision(4) << rate << " (se " << se << ")";
  return s.str();
}

// ---------------------------------------------------------------------------
// r2: coupled forward dynamics, discrepancy decay versus the analytic rate.

int run_r2_cmd(const GlobalArgs& args) {
  ConvergenceConfig config;
  const Settings s = load_settings(args);
  config.beta = setting_double(s, "beta", config.beta);
  config.n_max = setting_int(s, "n_max", config.n_max);
  config.box_side = setting_int(s, "box_side", config.box_side);
  config.t_end = setting_double(s, "t_end", config.t_end);
  config.grid_step = setting_double(s, "grid_step", config.grid_step);
  config.replicas = setting_int(s, "replicas", config.replicas);
  config.rate_slack = setting_double(s, "rate_slack", config.rate_slack);
  config.seed = setting_u64(s, "seed", config.seed);
  if (args.seed) config.seed = *args.seed;

  const ConvergenceReport report = run_convergence(config);

  Outputs out = experiment_outputs("r2", args);
  out.line(json{{"record", "config"}, {"experiment", "r2"}, {"values", config_json(config)}});
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    out.line(json{{"record", "point"},
                  {"time", report.times[i]},
                  {"mean_discrepancy", report.mean_discrepancy[i]}});
  }
  const bool pass = report.fit_present && report.rate_dominates;
  out.line(json{{"record", "outcome"},
                {"experiment", "r2"},
                {"pass", pass},
                {"full_start_size", report.full_start_size},
                {"coalesced_fraction", report.coalesced_fraction},
                {"mean_coalescence_time", report.mean_coalescence_time},
                {"fit_present", report.fit_present},
                {"fitted_rate", report.fitted_rate},
                {"fitted_rate_se", report.fitted_rate_se},
                {"reference_rate", report.reference_rate},
                {"rate_dominates", report.rate_dominates}});
  out.csv() << "time,mean_discrepancy\n";
  for (std::size_t i = 0; i < report.times.size(); ++i)
    out.csv() << report.times[i] << "," << report.mean_discrepancy[i] << "\n";
  return finish("r2", pass,
                "fitted_rate=" + format_rate(report.fitted_rate, report.fitted_rate_se) +
                    " reference=" + std::to_string(report.reference_rate));
}

// ---------------------------------------------------------------------------
// r3: finite-volume gaps on exact strips against the distance envelope.

int run_r3_cmd(const GlobalArgs& args) {
  VolumeEffectConfig config;
  const Settings s = load_settings(args);
  config.beta = setting_double(s, "beta", config.beta);
  config.n_max = setting_int(s, "n_max", config.n_max);
  config.strip_height = setting_int(s, "strip_height", config.strip_height);
  config.half_widths = setting_int_list(s, "half_widths", config.half_widths);
  config.reference_half_width =
      setting_int(s, "reference_half_width", config.reference_half_width);
  config.rate_slack = setting_double(s, "rate_slack", config.rate_slack);

  const VolumeEffectReport report = run_volume_effect(config);

  Outputs out = experiment_outputs("r3", args);
  out.line(json{{"record", "config"}, {"experiment", "r3"}, {"values", config_json(config)}});
  for (const auto& g : report.gaps) {
    out.line(json{{"record", "gap"},
                  {"half_width", g.half_width},
                  {"inner_value", g.inner_value},
                  {"gap", g.gap},
                  {"bound", g.bound},
                  {"within", g.within}});
  }
  const bool pass = report.all_within && report.fit_present && report.rate_dominates;
  out.line(json{{"record", "outcome"},
                {"experiment", "r3"},
                {"pass", pass},
                {"reference_value", report.reference_value},
                {"all_within", report.all_within},
                {"monotone", report.monotone},
                {"fit_present", report.fit_present},
                {"fitted_rate", report.fitted_rate},
                {"fitted_rate_se", report.fitted_rate_se},
                {"reference_rate", report.reference_rate},
                {"rate_dominates", report.rate_dominates}});
  out.csv() << "half_width,inner_value,gap,bound,within\n";
  for (const auto& g : report.gaps)
    out.csv() << g.half_width << "," << g.inner_value << "," << g.gap << "," << g.bound << ","
              << (g.within ? 1 : 0) << "\n";
  return finish("r3", pass,
                "fitted_rate=" + format_rate(report.fitted_rate, report.fitted_rate_se) +
                    " reference=" + std::to_string(report.reference_rate));
}

// ---------------------------------------------------------------------------
// r4: pair covariances, sampled on a box and exact on a strip.

int run_r4_cmd(const GlobalArgs& args) {
  ClusteringConfig config;
  const Settings s = load_settings(args);
  config.beta = setting_double(s, "beta", config.beta);
  config.n_max = setting_int(s, "n_max", config.n_max);
  config.box_side = setting_int(s, "box_side", config.box_side);
  config.replicas = setting_int(s, "replicas", config.replicas);
  config.batches = setting_int(s, "batches", config.batches);
  config.pair_distances = setting_int_list(s, "pair_distances", config.pair_distances);
  config.strip_width = setting_int(s, "strip_width", config.strip_width);
  config.strip_n_max = setting_int(s, "strip_n_max", config.strip_n_max);
  config.strip_distances = setting_int_list(s, "strip_distances", config.strip_distances);
  config.rate_slack = setting_double(s, "rate_slack", config.rate_slack);
  config.seed = setting_u64(s, "seed", config.seed);
  if (args.seed) config.seed = *args.seed;

  const ClusteringReport report = run_clustering(config);

  Outputs out = experiment_outputs("r4", args);
  out.line(json{{"record", "config"}, {"experiment", "r4"}, {"values", config_json(config)}});
  const auto emit_leg = [&out](const char* leg, const std::vector<CovariancePoint>& points) {
    for (const auto& p : points) {
      out.line(json{{"record", "covariance"},
                    {"leg", leg},
                    {"distance", p.distance},
                    {"covariance", p.covariance},
                    {"standard_error", p.standard_error},
                    {"envelope", p.envelope},
                    {"within", p.within}});
    }
  };
  emit_leg("empirical", report.empirical);
  emit_leg("strip", report.exact_strip);
  const bool pass = report.all_within && report.fit_present && report.rate_dominates;
  out.line(json{{"record", "outcome"},
                {"experiment", "r4"},
                {"pass", pass},
                {"all_within", report.all_within},
                {"fit_present", report.fit_present},
                {"fitted_rate", report.fitted_rate},
                {"fitted_rate_se", report.fitted_rate_se},
                {"reference_rate", report.reference_rate},
                {"rate_dominates", report.rate_dominates}});
  out.csv() << "leg,distance,covariance,standard_error,envelope,within\n";
  const auto csv_leg = [&out](const char* leg, const std::vector<CovariancePoint>& points) {
    for (const auto& p : points)
      out.csv() << leg << "," << p.distance << "," << p.covariance << "," << p.standard_error
                << "," << p.envelope << "," << (p.within ? 1 : 0) << "\n";
  };
  csv_leg("empirical", report.empirical);
  csv_leg("strip", report.exact_strip);
  return finish("r4", pass,
                "fitted_rate=" + format_rate(report.fitted_rate, report.fitted_rate_se) +
                    " reference=" + std::to_string(report.reference_rate));
}

// ---------------------------------------------------------------------------
// r5: standardized block sums against the normal law.

int run_r5_cmd(const GlobalArgs& args) {
  CltConfig config;
  const Settings s = load_settings(args);
  config.beta = setting_double(s, "beta", config.beta);
  config.n_max = setting_int(s, "n_max", config.n_max);
  config.block_side = setting_int(s, "block_side", config.block_side);
  config.margin = setting_int(s, "margin", config.margin);
  config.replicas = setting_int(s, "replicas", config.replicas);
  config.truncation_radius = setting_int(s, "truncation_radius", config.truncation_radius);
  config.ks_tolerance = setting_double(s, "ks_tolerance", config.ks_tolerance);
  config.stability_tolerance =
      setting_double(s, "stability_tolerance", config.stability_tolerance);
  config.seed = setting_u64(s, "seed", config.seed);
  if (args.seed) config.seed = *args.seed;

  const CltReport report = run_clt(config);

  Outputs out = experiment_outputs("r5", args);
  out.line(json{{"record", "config"}, {"experiment", "r5"}, {"values", config_json(config)}});
  for (std::size_t i = 0; i < report.standardized.size(); ++i)
    out.line(json{{"record", "standardized"}, {"index", i}, {"value", report.standardized[i]}});
  const bool pass = !report.degenerate_variance && report.ks_within && report.d_hat_stable;
  out.line(json{{"record", "outcome"},
                {"experiment", "r5"},
                {"pass", pass},
                {"observable_mean", report.observable_mean},
                {"d_hat", report.d_hat},
                {"d_hat_doubled", report.d_hat_doubled},
                {"d_hat_relative_change", report.d_hat_relative_change},
                {"d_hat_stable", report.d_hat_stable},
                {"degenerate_variance", report.degenerate_variance},
                {"ks_distance", report.ks_distance},
                {"ks_within", report.ks_within}});
  out.csv() << "field,value\n";
  out.csv() << "observable_mean," << report.observable_mean << "\n";
  out.csv() << "d_hat," << report.d_hat << "\n";
  out.csv() << "d_hat_doubled," << report.d_hat_doubled << "\n";
  out.csv() << "d_hat_relative_change," << report.d_hat_relative_change << "\n";
  out.csv() << "ks_distance," << report.ks_distance << "\n";
  out.csv() << "pass," << (pass ? 1 : 0) << "\n";
  std::ostringstream headline;
  headline << std::setprecision(4) << "ks=" << report.ks_distance << " d_hat=" << report.d_hat
           << " change=" << report.d_hat_relative_change;
  return finish("r5", pass, headline.str());
}

// ---------------------------------------------------------------------------
// r6: rescaled rare-contour positions against the Poisson picture.

int run_r6_cmd(const GlobalArgs& args) {
  PoissonConfig config;
  const Settings s = load_settings(args);
  config.beta_grid = setting_double_list(s, "beta_grid", config.beta_grid);
  config.target_means = setting_double_list(s, "target_means", config.target_means);
  config.replicas = setting_int_list(s, "replicas", config.replicas);
  config.contour_size = setting_int(s, "contour_size", config.contour_size);
  config.n_max = setting_int(s, "n_max", config.n_max);
  config.blocks_per_side = setting_int(s, "blocks_per_side", config.blocks_per_side);
  config.max_window_side = setting_int(s, "max_window_side", config.max_window_side);
  config.dispersion_tolerance =
      setting_double(s, "dispersion_tolerance", config.dispersion_tolerance);
  config.correlation_tolerance =
      setting_double(s, "correlation_tolerance", config.correlation_tolerance);
  config.min_observed_for_gates =
      setting_int(s, "min_observed_for_gates", config.min_observed_for_gates);
  config.seed = setting_u64(s, "seed", config.seed);
  if (args.seed) config.seed = *args.seed;

  const PoissonReport report = run_poisson(config);

  Outputs out = experiment_outputs("r6", args);
  out.line(json{{"record", "config"}, {"experiment", "r6"}, {"values", config_json(config)}});
  for (const auto& e : report.per_beta) {
    out.line(json{{"record", "beta"},
                  {"beta", e.beta},
                  {"window_side", e.window_side},
                  {"replicas", e.replicas},
                  {"observed", e.observed},
                  {"rescale_factor", e.rescale_factor},
                  {"intensity", e.intensity},
                  {"block_mean", e.block_mean},
                  {"block_dispersion", e.block_dispersion},
                  {"dispersion_se", e.dispersion_se},
                  {"gated", e.gated},
                  {"dispersion_within", e.dispersion_within},
                  {"corner_correlation", e.corner_correlation},
                  {"correlation_within", e.correlation_within},
                  {"nn_ks", e.nn_ks},
                  {"nn_count", e.nn_count}});
  }
  const bool pass = report.dispersion_ok && report.correlation_ok && report.trend_consistent;
  out.line(json{{"record", "outcome"},
                {"experiment", "r6"},
                {"pass", pass},
                {"dispersion_ok", report.dispersion_ok},
                {"correlation_ok", report.correlation_ok},
                {"trend_consistent", report.trend_consistent}});
  out.csv() << "beta,window_side,replicas,observed,intensity,block_mean,block_dispersion,"
               "dispersion_se,corner_correlation,nn_ks,nn_count,gated\n";
  for (const auto& e : report.per_beta)
    out.csv() << e.beta << "," << e.window_side << "," << e.replicas << "," << e.observed << ","
              << e.intensity << "," << e.block_mean << "," << e.block_dispersion << ","
              << e.dispersion_se << "," << e.corner_correlation << "," << e.nn_ks << ","
              << e.nn_count << "," << (e.gated ? 1 : 0) << "\n";
  std::ostringstream headline;
  headline << "betas=" << report.per_beta.size()
           << " dispersion_ok=" << (report.dispersion_ok ? 1 : 0)
           << " correlation_ok=" << (report.correlation_ok ? 1 : 0)
           << " trend=" << (report.trend_consistent ? 1 : 0);
  return finish("r6", pass, headline.str());
}

// ---------------------------------------------------------------------------
// cluster-stats: raw clan sweeps over a beta grid, or the full tail study.

int run_cluster_stats_cmd(std::vector<double> betas, int n_max, int replicas, int half_width,
                          bool tails, std::uint64_t seed, const GlobalArgs& args) {
  if (tails) {
    ClanTailsConfig config;
    const Settings s = load_settings(args);
    config.beta_grid = setting_double_list(s, "beta_grid", betas);
    config.replicas = setting_int_list(s, "replicas", std::vector<int>(betas.size(), replicas));
    config.n_max = setting_int(s, "n_max", n_max);
    config.box_half_width = setting_int(s, "box_half_width", half_width);
    config.gw_replicas = setting_int(s, "gw_replicas", config.gw_replicas);
    config.rate_slack = setting_double(s, "rate_slack", config.rate_slack);
    config.time_grid_step = setting_double(s, "time_grid_step", config.time_grid_step);
    config.min_fit_count = setting_int(s, "min_fit_count", config.min_fit_count);
    config.min_fit_points = setting_int(s, "min_fit_points", config.min_fit_points);
    config.seed = setting_u64(s, "seed", seed);
    if (args.seed) config.seed = *args.seed;

    const ClanTailsReport report = run_clan_tails(config);

    Outputs out = experiment_outputs("cluster-stats", args);
    out.line(json{{"record", "config"},
                  {"experiment", "clan-tails"},
                  {"values", config_json(config)}});
    bool pass = report.steepens;
    for (const auto& e : report.per_beta) {
      const auto emit_curve = [&out, &e](const char* kind,
                                         const std::vector<TailCurvePoint>& curve) {
        for (const auto& p : curve) {
          out.line(json{{"record", "tail"},
                        {"beta", e.beta},
                        {"kind", kind},
                        {"threshold", p.threshold},
                        {"survival", p.survival},
                        {"envelope", p.envelope},
                        {"within", p.within}});
        }
      };
      emit_curve("size", e.size_tail);
      emit_curve("width", e.width_tail);
      out.line(json{{"record", "beta_summary"},
                    {"beta", e.beta},
                    {"replicas", e.replicas},
                    {"nonempty", e.nonempty},
                    {"p_nonempty", e.p_nonempty},
                    {"max_size", e.max_size},
                    {"size_within", e.size_within},
                    {"width_within", e.width_within},
                    {"time_fit_present", e.time_fit_present},
                    {"time_rate", e.time_rate},
                    {"time_rate_se", e.time_rate_se},
                    {"time_reference", e.time_reference},
                    {"time_rate_dominates", e.time_rate_dominates},
                    {"domination_violations", e.domination_violations}});
      pass = pass && e.size_within && e.width_within && e.domination_violations == 0 &&
             (!e.time_fit_present || e.time_rate_dominates);
    }
    out.line(json{{"record", "outcome"},
                  {"experiment", "clan-tails"},
                  {"pass", pass},
                  {"steepens", report.steepens}});
    out.csv() << "beta,replicas,nonempty,p_nonempty,max_size,size_within,width_within,"
                 "time_rate,time_reference,domination_violations\n";
    for (const auto& e : report.per_beta)
      out.csv() << e.beta << "," << e.replicas << "," << e.nonempty << "," << e.p_nonempty << ","
                << e.max_size << "," << (e.size_within ? 1 : 0) << ","
                << (e.width_within ? 1 : 0) << "," << e.time_rate << "," << e.time_reference
                << "," << e.domination_violations << "\n";
    return finish("cluster-stats", pass,
                  "steepens=" + std::to_string(report.steepens ? 1 : 0));
  }

  // Raw sweep: one line per replica, one summary per beta.
  const std::vector<SpaceTimePoint> targets{{Plaquette{0, 0, 0}, 0.0}};
  const Box region = Box::square(2 * half_width + 1, -half_width, -half_width);
  Outputs out(args);
  out.line(json{{"record", "run"},
                {"sampler", "clan"},
                {"betas", betas},
                {"n_max", n_max},
                {"replicas", replicas},
                {"half_width", half_width},
                {"seed", seed}});
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    const WeightedCatalog catalog = build_catalog(betas[bi], n_max, region);
    Rng rng(derive_seed(seed, kCliClanTag, bi));
    const ClanStatsBatch batch = clan_stats(targets, catalog, replicas, rng);
    std::uint64_t nonempty = 0;
    std::uint64_t max_size = 0;
    for (std::size_t r = 0; r < batch.samples.size(); ++r) {
      const ClanStats& stats = batch.samples[r];
      if (stats.cumulative_size > 0) ++nonempty;
      max_size = std::max(max_size, stats.cumulative_size);
      out.line(json{{"record", "clan"},
                    {"beta", betas[bi]},
                    {"replica", r},
                    {"size", stats.cumulative_size},
                    {"width", stats.projection_width},
                    {"time_length", stats.time_length}});
    }
    out.line(json{{"record", "summary"},
                  {"beta", betas[bi]},
                  {"replicas", replicas},
                  {"capped", batch.capped},
                  {"nonempty", nonempty},
                  {"p_nonempty", double(nonempty) / double(batch.samples.size())},
                  {"max_size", max_size}});
  }
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"exact samplers and bound checks for planar contour gases"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs global;
  std::uint64_t seed_value = 20240801;
  std::string config_value, out_value;
  app.add_option("--seed", seed_value, "root seed for all replica streams");
  app.add_option("--config", config_value, "flat key=value settings file");
  app.add_option("--out", out_value, "output base path (writes PATH.jsonl and PATH.csv)");

  double beta = 2.0;
  int n_max = 10;
  int box_side = 4;
  double t_end = 10.0;
  int replicas = 100;
  int half_width = 16;
  bool list_entries = false;
  bool tails = false;
  std::optional<int> enum_box;
  std::string emit = "config";
  std::vector<double> betas{1.5, 2.0};

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "analytic activity and rate record");
  bounds_cmd->add_option("--beta", beta, "inverse temperature")->required();
  bounds_cmd->add_option("--nmax", n_max, "largest contour size kept");

  CLI::App* enum_cmd = app.add_subcommand("enumerate", "catalog counts and weights");
  enum_cmd->add_option("--beta", beta, "inverse temperature")->required();
  enum_cmd->add_option("--nmax", n_max, "largest contour size kept");
  enum_cmd->add_option("--box", enum_box, "restrict to contours inside an LxL box");
  enum_cmd->add_flag("--list", list_entries, "also emit every catalog entry");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "exact measure table on a small box");
  oracle_cmd->add_option("--beta", beta, "inverse temperature")->required();
  oracle_cmd->add_option("--box", box_side, "box side L")->required();
  oracle_cmd->add_option("--nmax", n_max, "largest contour size kept");

  CLI::App* forward_cmd = app.add_subcommand("sample-forward", "mark-by-mark trajectories");
  forward_cmd->add_option("--beta", beta, "inverse temperature")->required();
  forward_cmd->add_option("--box", box_side, "box side L")->required();
  forward_cmd->add_option("--nmax", n_max, "largest contour size kept");
  forward_cmd->add_option("--t-end", t_end, "time horizon");
  forward_cmd->add_option("--replicas", replicas, "independent trajectories");

  CLI::App* perfect_cmd = app.add_subcommand("sample-perfect", "stationary window samples");
  perfect_cmd->add_option("--beta", beta, "inverse temperature")->required();
  perfect_cmd->add_option("--box", box_side, "box side L")->required();
  perfect_cmd->add_option("--nmax", n_max, "largest contour size kept");
  perfect_cmd->add_option("--replicas", replicas, "independent samples");
  perfect_cmd->add_option("--emit", emit, "per-replica payload")
      ->check(CLI::IsMember({"config", "stats"}));

  CLI::App* clan_cmd = app.add_subcommand("cluster-stats", "clan sweeps over a beta grid");
  clan_cmd->add_option("--betas", betas, "beta grid")->delimiter(',');
  clan_cmd->add_option("--nmax", n_max, "largest contour size kept");
  clan_cmd->add_option("--replicas", replicas, "clans per beta");
  clan_cmd->add_option("--half-width", half_width, "free-process truncation half width");
  clan_cmd->add_flag("--tails", tails, "run the full tail study with envelopes and gates");

  CLI::App* r2_cmd = app.add_subcommand("r2", "convergence-rate study");
  CLI::App* r3_cmd = app.add_subcommand("r3", "finite-volume-effect study");
  CLI::App* r4_cmd = app.add_subcommand("r4", "clustering study");
  CLI::App* r5_cmd = app.add_subcommand("r5", "block-sum normality study");
  CLI::App* r6_cmd = app.add_subcommand("r6", "rare-contour Poisson study");

  CLI11_PARSE(app, argc, argv);

  if (app.count("--seed") > 0) global.seed = seed_value;
  if (app.count("--config") > 0) global.config_path = config_value;
  if (app.count("--out") > 0) global.out_base = out_value;

  const std::uint64_t seed = global.seed.value_or(seed_value);
  if (bounds_cmd->parsed()) return run_bounds_cmd(beta, n_max, global);
  if (enum_cmd->parsed()) return run_enumerate_cmd(beta, n_max, enum_box, list_entries, global);
  if (oracle_cmd->parsed()) return run_oracle_cmd(beta, box_side, n_max, global);
  if (forward_cmd->parsed())
    return run_forward_cmd(beta, box_side, n_max, t_end, replicas, seed, global);
  if (perfect_cmd->parsed())
    return run_perfect_cmd(beta, box_side, n_max, replicas, seed, emit, global);
  if (clan_cmd->parsed())
    return run_cluster_stats_cmd(betas, n_max, replicas, half_width, tails, seed, global);
  if (r2_cmd->parsed()) return run_r2_cmd(global);
  if (r3_cmd->parsed()) return run_r3_cmd(global);
  if (r4_cmd->parsed()) return run_r4_cmd(global);
  if (r5_cmd->parsed()) return run_r5_cmd(global);
  if (r6_cmd->parsed()) return run_r6_cmd(global);
  return 2;
}

}  // namespace
}  // namespace loopgas

int main(int argc, char** argv) {
  try {
    return loopgas::dispatch(argc, argv);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
}
