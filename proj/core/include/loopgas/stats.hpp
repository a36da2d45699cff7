#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace loopgas {

// Streaming mean and variance (Welford's update); numerically stable for
// long accumulation runs.
class RunningMoments {
 public:
  void push(double x);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // sample variance (n-1 denominator), 0 below n=2
  double stddev() const;
  double standard_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Standard normal CDF, computed through erfc to keep the lower tail accurate.
double normal_cdf(double x);
double normal_cdf(double x, double mu, double sigma);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
// series for x < a + 1 and a continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_p_value(double statistic, int dof);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // from the residual variance; 0 below 3 points
};

// Ordinary least squares on (x, y) pairs; sizes must match and be >= 2.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

// Kolmogorov-Smirnov distance between a sample and Normal(mu, sigma).
// Takes the sample by value, sorting its copy.
double ks_distance_normal(std::vector<double> samples, double mu, double sigma);

// Total variation distance between two probability vectors over the same
// support ordering: (1/2) sum |p_i - q_i|.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace loopgas
