#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "loopgas/catalog.hpp"
#include "loopgas/lattice.hpp"
#include "loopgas/rng.hpp"

namespace loopgas {

// Per-size contour counts plus the two parameters every branching formula
// needs. Counts are per fixed plaquette, the same convention as lambda_beta.
struct BranchingSpec {
  double beta = 0.0;
  int d = 2;
  int n_max = 0;
  std::map<int, std::uint64_t> counts;

  // Counts from the planar enumeration; the only dimension with them.
  static BranchingSpec planar(double beta, int n_max);

  double activity() const;        // sum n a_n e^{-beta n}
  double weight_sum() const;      // sum a_n e^{-beta n}
  double mean_offspring() const;  // (d-1) * activity()
};

// Finite-sum offspring generating value exp(sum a_n e^{-beta n}(a^{(d-1)n}-1)),
// defined for every a >= 0. No remainder control; prefer f_gen when the
// argument stays below the certification radius.
double f_truncated(double a, const BranchingSpec& spec);

struct FGenResult {
  double value = 0.0;
  // Bound on the neglected exponent mass: the true generating value lies
  // within a factor e^{+-log_truncation_bound} of `value`.
  double log_truncation_bound = 0.0;
};

// Certified generating value. The remainder series only converges while
// a < e^{(beta - tail_divergence_beta())/(d-1)}; beyond that radius no
// certificate exists and the call refuses.
FGenResult f_gen(double a, const BranchingSpec& spec);

struct CriticalPoints {
  double a_bar = 0.0;  // root of sum n a_n e^{-beta n} a^{(d-1)n} = 1/(d-1)
  double b_bar = 0.0;  // a_bar / f(a_bar), > 1 in the admissible regime
};

// Both tilt parameters. Requires beta above the certified activity threshold
// beta_M(d, n_max).upper; throws otherwise. The closed-form cross-check
// a_bar = e^{(beta - beta_M)/(d-1)} holds against the value-only root, which
// lives at the same truncation as the defining sum.
CriticalPoints critical_points(const BranchingSpec& spec);

struct RateBundle {
  double m2 = 0.0;            // E[b_bar^Z], analytic fixed-point value (= a_bar)
  double m2_simulated = 0.0;  // empirical E[b_bar^Z]; heavy-tailed, indicative only
  double m3 = 0.0;            // log b_bar
  double time_exponent = 0.0; // 1 - (d-1) * activity
  double m0 = 0.0;            // strict upper bound (1-m)/(2-m), supremum form
  std::uint64_t replicas = 0;
  std::uint64_t capped = 0;   // replicas that hit the growth cap (excluded)
};

RateBundle rate_bundle(const BranchingSpec& spec, Rng& rng, std::uint64_t replicas = 100000);

struct GwOutcome {
  std::uint64_t progeny = 0;  // individuals ever born, root included
  bool capped = false;        // growth cap hit; progeny is then a lower bound
};

// Total progeny of the single-type walk: the root plus, per individual,
// (d-1) * n fresh individuals for each of a Poisson(a_n e^{-beta n}) hit at
// every size n. Caps at 10^6 individuals so supercritical misuse terminates.
GwOutcome simulate_gw(const BranchingSpec& spec, Rng& rng);

// Shape-level continuous-time branching: types are the translation classes,
// and a dying individual of type t spawns Poisson(k * e^{-beta * size_u})
// children of type u, where k counts the placements of u incompatible with a
// fixed placement of t.
struct MultitypeModel {
  double beta = 0.0;
  std::vector<int> type_sizes;
  std::vector<std::vector<double>> spawn_mean;  // [parent type][child type]

  static MultitypeModel planar(double beta, int n_max);
  // Single type that spawns nothing: pure death at rate 1.
  static MultitypeModel isolated(double beta, int size);

  double total_spawn_mean(int type) const;
};

struct MultitypeOutcome {
  bool extinct = false;
  double extinction_time = 0.0;  // meaningful only when extinct
  std::uint64_t total_born = 0;
  bool capped = false;
  // Population size after every birth/death event, time-ordered.
  std::vector<std::pair<double, std::uint32_t>> population_steps;
};

MultitypeOutcome simulate_multitype(const MultitypeModel& model, int initial_type,
                                    double horizon, Rng& rng);
// Convenience overload resolving the initial contour to its translation class.
MultitypeOutcome simulate_multitype(const BranchingSpec& spec, const Contour& initial,
                                    double horizon, Rng& rng);

}  // namespace loopgas
