#include "loopgas/branching.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "loopgas/enumerate.hpp"

namespace loopgas {

namespace {

constexpr std::uint64_t kGrowthCap = 1'000'000;

void check_admissible(const BranchingSpec& spec) {
  // Certified gate: above beta_M's upper root the activity is provably
  // below 1/(d-1) including every neglected size.
  const auto roots = beta_M(spec.d, spec.n_max);
  if (!(spec.beta > roots.upper))
    throw std::runtime_error("subcriticality violated: beta is not above the certified threshold");
}

}  // namespace

BranchingSpec BranchingSpec::planar(double beta, int n_max) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  BranchingSpec spec;
  spec.beta = beta;
  spec.d = 2;
  spec.n_max = n_max;
  spec.counts = activity_counts(n_max);  // validates the cutoff
  return spec;
}

double BranchingSpec::activity() const {
  double sum = 0.0;
  for (const auto& [n, c] : counts) sum += double(n) * double(c) * std::exp(-beta * double(n));
  return sum;
}

double BranchingSpec::weight_sum() const {
  double sum = 0.0;
  for (const auto& [n, c] : counts) sum += double(c) * std::exp(-beta * double(n));
  return sum;
}

double BranchingSpec::mean_offspring() const { return double(d - 1) * activity(); }

double f_truncated(double a, const BranchingSpec& spec) {
  if (!(a >= 0.0)) throw std::invalid_argument("f_truncated: need a >= 0");
  double exponent = 0.0;
  for (const auto& [n, c] : spec.counts) {
    const double power = std::pow(a, double((spec.d - 1) * n));
    exponent += double(c) * std::exp(-spec.beta * double(n)) * (power - 1.0);
  }
  return std::exp(exponent);
}

FGenResult f_gen(double a, const BranchingSpec& spec) {
  if (!(a >= 0.0)) throw std::invalid_argument("f_gen: need a >= 0");
  if (!(spec.beta > tail_divergence_beta()))
    throw std::runtime_error(
        "f_gen: no remainder certificate at or below the divergence temperature");
  const double radius = std::exp((spec.beta - tail_divergence_beta()) / double(spec.d - 1));
  if (!(a < radius))
    throw std::runtime_error("f_gen: argument outside the certification radius");

  FGenResult out;
  out.value = f_truncated(a, spec);
  // Neglected exponent mass over even sizes above the cutoff, using the walk
  // count 3^n: both the a-power part and the constant part are geometric.
  const double base = 3.0 * std::exp(-spec.beta) * std::pow(std::max(a, 1.0), double(spec.d - 1));
  const double q = base * base;
  const double k = double((spec.n_max + 2) / 2);
  out.log_truncation_bound = 2.0 * std::pow(q, k) / (1.0 - q);
  return out;
}

CriticalPoints critical_points(const BranchingSpec& spec) {
  check_admissible(spec);
  // The defining sum is strictly increasing in a with value 0 at a = 0, so
  // bisection on a doubling bracket always lands on the unique root.
  const double target = 1.0 / double(spec.d - 1);
  const auto excess = [&](double a) {
    double sum = 0.0;
    for (const auto& [n, c] : spec.counts)
      sum += double(n) * double(c) * std::exp(-spec.beta * double(n)) *
             std::pow(a, double((spec.d - 1) * n));
    return sum - target;
  };
  double lo = 0.0, hi = 1.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }

  CriticalPoints out;
  out.a_bar = 0.5 * (lo + hi);
  out.b_bar = out.a_bar / f_truncated(out.a_bar, spec);
  if (!(out.b_bar > 1.0))
    throw std::logic_error("critical_points: tilt failed to exceed 1 in the admissible regime");
  return out;
}

GwOutcome simulate_gw(const BranchingSpec& spec, Rng& rng) {
  // Poisson hit count per size, each hit contributing (d-1)*n individuals.
  std::vector<std::pair<double, std::uint64_t>> mean_mult;
  mean_mult.reserve(spec.counts.size());
  for (const auto& [n, c] : spec.counts)
    mean_mult.emplace_back(double(c) * std::exp(-spec.beta * double(n)),
                           std::uint64_t(spec.d - 1) * std::uint64_t(n));

  GwOutcome out;
  out.progeny = 1;
  std::uint64_t unprocessed = 1;
  while (unprocessed > 0) {
    --unprocessed;
    for (const auto& [mean, mult] : mean_mult) {
      const std::uint64_t children = rng.poisson(mean) * mult;
      out.progeny += children;
      unprocessed += children;
    }
    if (out.progeny > kGrowthCap) {
      out.capped = true;
      break;
    }
  }
  return out;
}

RateBundle rate_bundle(const BranchingSpec& spec, Rng& rng, std::uint64_t replicas) {
  check_admissible(spec);
  const CriticalPoints cp = critical_points(spec);
  const double m = spec.mean_offspring();

  RateBundle out;
  out.m2 = cp.a_bar;  // fixed point of the progeny transform at b_bar
  out.m3 = std::log(cp.b_bar);
  out.time_exponent = 1.0 - m;
  out.m0 = (1.0 - m) / (2.0 - m);
  out.replicas = replicas;

  double sum = 0.0;
  std::uint64_t used = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const GwOutcome gw = simulate_gw(spec, rng);
    if (gw.capped) {
      ++out.capped;
      continue;
    }
    sum += std::pow(cp.b_bar, double(gw.progeny));
    ++used;
  }
  out.m2_simulated = used > 0 ? sum / double(used) : 0.0;
  return out;
}

MultitypeModel MultitypeModel::planar(double beta, int n_max) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const ShapeTable& table = shared_shape_table(n_max);
  const std::size_t s = table.shapes().size();

  MultitypeModel model;
  model.beta = beta;
  model.type_sizes.reserve(s);
  for (std::uint32_t t = 0; t < s; ++t) model.type_sizes.push_back(int(table.size(t)));
  model.spawn_mean.assign(s, std::vector<double>(s, 0.0));
  for (std::uint32_t t = 0; t < s; ++t)
    for (std::uint32_t u = 0; u < s; ++u)
      model.spawn_mean[t][u] = double(table.incompatible_offsets(t, u).size()) *
                               std::exp(-beta * double(table.size(u)));
  return model;
}

MultitypeModel MultitypeModel::isolated(double beta, int size) {
  MultitypeModel model;
  model.beta = beta;
  model.type_sizes = {size};
  model.spawn_mean = {{0.0}};
  return model;
}

double MultitypeModel::total_spawn_mean(int type) const {
  double sum = 0.0;
  for (double m : spawn_mean[type]) sum += m;
  return sum;
}

MultitypeOutcome simulate_multitype(const MultitypeModel& model, int initial_type,
                                    double horizon, Rng& rng) {
  if (initial_type < 0 || std::size_t(initial_type) >= model.type_sizes.size())
    throw std::invalid_argument("simulate_multitype: unknown type");
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate_multitype: negative horizon");

  // Deaths ordered by (time, insertion sequence) so ties resolve identically
  // on every run with the same seed.
  using Death = std::tuple<double, std::uint64_t, int>;
  std::priority_queue<Death, std::vector<Death>, std::greater<Death>> deaths;
  std::uint64_t seq = 0;

  MultitypeOutcome out;
  out.total_born = 1;
  deaths.emplace(rng.exponential(), seq++, initial_type);
  std::uint32_t alive = 1;
  out.population_steps.emplace_back(0.0, alive);

  while (!deaths.empty()) {
    const auto [time, _, type] = deaths.top();
    if (time > horizon) break;  // everyone in the queue survives to the horizon
    deaths.pop();
    --alive;
    for (std::size_t u = 0; u < model.spawn_mean[type].size(); ++u) {
      const std::uint64_t n = rng.poisson(model.spawn_mean[type][u]);
      for (std::uint64_t i = 0; i < n; ++i)
        deaths.emplace(time + rng.exponential(), seq++, int(u));
      alive += std::uint32_t(n);
      out.total_born += n;
    }
    out.population_steps.emplace_back(time, alive);
    if (out.total_born > kGrowthCap) {
      out.capped = true;
      return out;
    }
    if (alive == 0) {
      out.extinct = true;
      out.extinction_time = time;
      return out;
    }
  }
  return out;
}

MultitypeOutcome simulate_multitype(const BranchingSpec& spec, const Contour& initial,
                                    double horizon, Rng& rng) {
  const ShapeTable& table = shared_shape_table(spec.n_max);
  const MultitypeModel model = MultitypeModel::planar(spec.beta, spec.n_max);
  return simulate_multitype(model, int(table.id_of_placed(initial)), horizon, rng);
}

}  // namespace loopgas
