#include "otlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "otlab/error.hpp"

namespace otlab {

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(values.size() - 1);
  s.se = std::sqrt(s.variance / static_cast<double>(values.size()));
  return s;
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                     bool scale_by_residuals) {
  require(x.size() == y.size(), "fit_linear: x and y differ in length");
  require(weights.empty() || weights.size() == x.size(), "fit_linear: weights differ in length");
  require(x.size() >= 2, "fit_linear needs at least two points");
  const std::size_t n = x.size();
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(x[i]) && std::isfinite(y[i]) && w(i) > 0.0, "fit_linear: non-finite data or weight");
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w(i) * (x[i] - mx) * (x[i] - mx);
    sxy += w(i) * (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_linear: x values are all equal");
  LinearFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.rss += w(i) * r * r;
  }
  double sigma2 = 1.0;
  if (scale_by_residuals) sigma2 = n > 2 ? f.rss / static_cast<double>(n - 2) : 0.0;
  f.slope_se = std::sqrt(sigma2 / sxx);
  f.intercept_se = std::sqrt(sigma2 * (1.0 / sw + mx * mx / sxx));
  return f;
}

std::pair<double, double> LinearFit::slope_ci(double level) const {
  const double dof = points > 2 ? static_cast<double>(points - 2) : 1.0;
  const double q = student_t_quantile(0.5 + level / 2.0, dof);
  return {slope - q * slope_se, slope + q * slope_se};
}

double normal_cdf(double z) { return boost::math::cdf(boost::math::normal_distribution<double>(), z); }

double student_t_quantile(double prob, double dof) {
  require(prob > 0.0 && prob < 1.0 && dof > 0.0, "student_t_quantile: bad arguments");
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), prob);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), "ks_statistic needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  require(n > 0, "ks_pvalue needs n > 0");
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  if (lambda < 0.2) return 1.0;
  // Q_KS(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace otlab
