#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace otlab {

/// Mean, unbiased variance and standard error of the mean.
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se = 0.0;
};

/// Two-pass, in input order (deterministic).
Summary summarize(std::span<const double> values);

/// Weighted least squares y = intercept + slope * x. With empty `weights`
/// every point has weight 1. Standard errors use the residual scale with
/// n - 2 degrees of freedom when `scale_by_residuals` is true, otherwise the
/// weights are taken as exact inverse variances.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double rss = 0.0;
  std::size_t points = 0;

  /// Two-sided interval for the slope at the given level (Student t with
  /// points - 2 degrees of freedom).
  std::pair<double, double> slope_ci(double level = 0.95) const;
};

LinearFit fit_linear(std::span<const double> x, std::span<const double> y, std::span<const double> weights = {},
                     bool scale_by_residuals = true);

double normal_cdf(double z);
double student_t_quantile(double prob, double dof);

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic p-value of the one-sample KS test with the Stephens
/// small-sample correction.
double ks_pvalue(double d, std::size_t n);

}  // namespace otlab
