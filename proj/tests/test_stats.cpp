#include "loopgas/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace loopgas {
namespace {

TEST(RunningMoments, MatchesClosedForms) {
  RunningMoments m;
  for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) m.push(x);
  EXPECT_EQ(m.count(), 8u);
  EXPECT_DOUBLE_EQ(m.mean(), 5.0);
  EXPECT_DOUBLE_EQ(m.variance(), 32.0 / 7.0);          // sum of squares is 32
  EXPECT_DOUBLE_EQ(m.standard_error(), std::sqrt(32.0 / 56.0));
}

TEST(RunningMoments, StableUnderShift) {
  // The naive sum-of-squares formula loses everything here; Welford must not.
  RunningMoments m;
  const double base = 1e9;
  for (double x : {base + 1.0, base + 2.0, base + 3.0}) m.push(x);
  EXPECT_NEAR(m.mean(), base + 2.0, 1e-6);
  EXPECT_NEAR(m.variance(), 1.0, 1e-9);
}

TEST(NormalCdf, ReferenceValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517796, 1e-15);
  EXPECT_NEAR(normal_cdf(-3.0), 1.3498980316300945e-3, 1e-17);
  EXPECT_NEAR(normal_cdf(1.0) + normal_cdf(-1.0), 1.0, 1e-15);
  EXPECT_NEAR(normal_cdf(5.0, 3.0, 2.0), normal_cdf(1.0), 1e-15);
  EXPECT_THROW(normal_cdf(0.0, 0.0, 0.0), std::invalid_argument);
}

// Half-integer shape parameters have closed forms; those are the oracle for
// both branches (series and continued fraction) of the implementation.
TEST(GammaTail, ClosedFormsAtSmallShape) {
  // Q for chi-square dof=2 is exp(-x/2); dof=4 is exp(-x/2)(1 + x/2).
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0}) {
    EXPECT_NEAR(chi_square_p_value(x, 2), std::exp(-0.5 * x), 1e-13) << x;
    EXPECT_NEAR(chi_square_p_value(x, 4), std::exp(-0.5 * x) * (1.0 + 0.5 * x), 1e-13) << x;
    // dof=1 reduces to the normal tail: Q = erfc(sqrt(x/2)).
    EXPECT_NEAR(chi_square_p_value(x, 1), std::erfc(std::sqrt(0.5 * x)), 1e-13) << x;
  }
  EXPECT_NEAR(chi_square_p_value(3.841458820694124, 1), 0.05, 1e-12);
}

TEST(GammaTail, LargeShapeReferenceValues) {
  // High-precision values computed externally; exercises the continued
  // fraction and the series far from the closed-form regime.
  EXPECT_NEAR(chi_square_p_value(3.0, 10), 0.9814240637778593, 1e-12);
  EXPECT_NEAR(chi_square_p_value(250.0, 223), 0.10356083721867336, 1e-12);
  EXPECT_NEAR(chi_square_p_value(180.0, 223), 0.9842974593067973, 1e-12);
  EXPECT_NEAR(chi_square_p_value(111.0, 111), 0.48214811677981, 1e-12);
}

TEST(GammaTail, EdgesAndErrors) {
  EXPECT_DOUBLE_EQ(chi_square_p_value(0.0, 5), 1.0);
  EXPECT_DOUBLE_EQ(chi_square_p_value(-1.0, 5), 1.0);
  EXPECT_GT(regularized_gamma_q(2.0, 1e-12), 1.0 - 1e-10);
  EXPECT_LT(regularized_gamma_q(2.0, 1e3), 1e-300);
  EXPECT_THROW(regularized_gamma_q(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(regularized_gamma_q(1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(chi_square_p_value(1.0, 0), std::invalid_argument);
}

TEST(LineFit, ExactLine) {
  const std::vector<double> xs = {0, 1, 2, 3, 4};
  const std::vector<double> ys = {1, 3, 5, 7, 9};
  const auto fit = fit_line(xs, ys);
  EXPECT_DOUBLE_EQ(fit.slope, 2.0);
  EXPECT_DOUBLE_EQ(fit.intercept, 1.0);
  EXPECT_NEAR(fit.slope_se, 0.0, 1e-12);
}

TEST(LineFit, KnownResiduals) {
  // y = x with the middle point displaced by 3: slope stays 1, the residual
  // variance is ssr/(n-2) = 6/2 with ssr = 2^2 + 1^2 + 1^2 = 6.
  const std::vector<double> xs = {0, 1, 2};
  const std::vector<double> ys = {0, 4, 2};
  const auto fit = fit_line(xs, ys);
  EXPECT_DOUBLE_EQ(fit.slope, 1.0);
  EXPECT_DOUBLE_EQ(fit.intercept, 1.0);
  EXPECT_DOUBLE_EQ(fit.slope_se, std::sqrt(6.0 / 1.0 / 2.0));
  EXPECT_THROW(fit_line(std::vector<double>{1, 1}, std::vector<double>{0, 1}),
               std::invalid_argument);
  EXPECT_THROW(fit_line(std::vector<double>{1}, std::vector<double>{0}),
               std::invalid_argument);
}

TEST(KsDistance, SmallSamples) {
  // Single sample at the median: empirical CDF jumps 0 -> 1 there, so the
  // distance is exactly 1/2.
  EXPECT_DOUBLE_EQ(ks_distance_normal({0.0}, 0.0, 1.0), 0.5);
  // Far-off sample saturates the distance.
  EXPECT_NEAR(ks_distance_normal({100.0}, 0.0, 1.0), 1.0, 1e-12);
  EXPECT_THROW(ks_distance_normal({}, 0.0, 1.0), std::invalid_argument);
}

TEST(TotalVariation, Basics) {
  const std::vector<double> p = {0.5, 0.5, 0.0};
  const std::vector<double> q = {0.25, 0.25, 0.5};
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.5);
  EXPECT_DOUBLE_EQ(total_variation(p, p), 0.0);
  EXPECT_THROW(total_variation(p, std::vector<double>{1.0}), std::invalid_argument);
}

}  // namespace
}  // namespace loopgas
