#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "otlab/process_model.hpp"

namespace otlab {

enum class CurveKind { variance, absdev, cost };

const char* to_string(CurveKind kind);

/// A Monte Carlo curve over a strictly increasing window grid.
struct CostCurve {
  CurveKind kind = CurveKind::variance;
  std::vector<double> n;
  std::vector<double> mean;
  std::vector<double> se;
  std::size_t replicas = 0;
  std::string model;
  std::uint64_t seed = 0;
  /// Cost curves only.
  double p = 0.0;
  double delta = 0.0;
  /// Per-replica contributions, row-major (replica, grid point). Their
  /// column means are `mean`.
  std::vector<double> replica_values;

  double value(std::size_t replica, std::size_t i) const { return replica_values[replica * n.size() + i]; }
};

struct EstimatorOptions {
  int threads = 0;
  /// Solver resolution for cost curves.
  double delta = 1.0 / 64.0;
  /// Initial padding for cost curves; <= 0 selects 4 sqrt(n) + 8.
  double initial_padding = 0.0;
};

/// Number variance of counts. Every replica samples the largest window once;
/// smaller windows are nested prefixes and, for each n, the disjoint
/// translates [j n, (j + 1) n) are pooled into the estimate (each translate
/// gets its own across-replica mean). Needs R >= 100.
CostCurve variance_curve(const ProcessModel& model, std::span<const double> n_grid, std::size_t replicas,
                         std::uint64_t seed, const EstimatorOptions& options = {});

/// Mean of |n - count([0, n))| with the same sampling scheme.
CostCurve central_moment_curve(const ProcessModel& model, std::span<const double> n_grid, std::size_t replicas,
                               std::uint64_t seed, const EstimatorOptions& options = {});

/// Per replica, the adaptive-padding semicoupling cost on [0, n) divided by
/// n, with nested windows.
CostCurve cost_curve(const ProcessModel& model, double p, std::span<const double> n_grid, std::size_t replicas,
                     std::uint64_t seed, const EstimatorOptions& options = {});

struct CltResult {
  double n = 0.0;
  double ks = 0.0;
  double pvalue = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  /// p-value above 0.01.
  bool consistent = false;
};

/// KS distance between standardized counts in [0, n) and N(0, 1). Counts
/// are spread by independent U(-1/2, 1/2) before standardizing (continuity
/// correction); degeneracy is judged on the raw counts. Throws
/// when the sample standard deviation is zero, unless `allow_degenerate`,
/// in which case the result reports pvalue 0.
CltResult clt_diagnostic(const ProcessModel& model, double n, std::size_t replicas, std::uint64_t seed,
                         const EstimatorOptions& options = {}, bool allow_degenerate = false);
CltResult clt_from_counts(double n, std::span<const double> counts, std::uint64_t jitter_seed);

struct RatioRow {
  double n = 0.0;
  double a_n = 0.0;
  double ratio = 0.0;
};

struct RegularVarianceReport {
  std::vector<RatioRow> power_sequence;  // a_n = floor(n^0.8)
  std::vector<RatioRow> log_sequence;    // a_n = floor(n / log n)
  bool power_decreasing = false;
  bool log_decreasing = false;
  bool regular() const { return power_decreasing && log_decreasing; }
};

/// f(a_n) / f(n) along the grid, with f interpolated linearly in
/// (log n, log f). A sequence counts as decreasing when no step rises by more
/// than 0.02 and the last ratio is at most 0.9 times the first.
RegularVarianceReport regular_variance_check(std::span<const double> n, std::span<const double> f);

enum class GrowthModel { power, logarithmic };

struct GrowthFit {
  double gamma = 0.0;
  double gamma_lo = 0.0, gamma_hi = 0.0;
  double log_coef = 0.0;
  double log_lo = 0.0, log_hi = 0.0;
  double log_intercept = 0.0;
  /// Weighted residual sums on the log f axis.
  double rss_power = 0.0, rss_log = 0.0;
  GrowthModel preferred = GrowthModel::power;
  /// 1 - gamma / 2 for power growth, 1 for logarithmic or bounded growth.
  double p_star = 1.0;
};

/// Fits log f = c + gamma log n and f = a log n + b by weighted least squares
/// (weights from the standard errors) and prefers the smaller residual sum.
/// An identically zero curve is bounded: power growth with gamma 0.
GrowthFit fit_growth(const CostCurve& curve);

struct CostClassification {
  double p = 0.0;
  double slope = 0.0;
  double slope_lo = 0.0, slope_hi = 0.0;
  bool growing = false;
};

/// Weighted log-log slope of a cost curve; "growing" when the lower end of
/// the 95% interval exceeds `tolerance`.
CostClassification classify_cost_curve(const CostCurve& curve, double tolerance);

/// Midpoint between the largest bounded p below the smallest growing p and
/// that growing p. All bounded: the largest p; all growing: the smallest p.
double cost_route_threshold(std::span<const CostClassification> classes);

struct ScalingReport {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  double delta = 0.0;
  CostCurve variance;
  GrowthFit growth;
  double variance_p_star = 1.0;
  std::vector<CostCurve> cost_curves;
  std::vector<CostClassification> cost_classes;
  double slope_tolerance = 0.0;
  /// NaN when no cost route was run.
  double cost_p_star = 0.0;
  bool routes_agree = false;
  std::vector<CltResult> clt;
  RegularVarianceReport regular_variance;
  /// Which hypotheses back the variance-route verdict.
  std::string justification;
};

struct ThresholdOptions {
  EstimatorOptions estimator;
  /// Log-log slopes up to this value still count as bounded.
  double slope_tolerance = 0.05;
  bool cost_route = true;
  /// Replicas for the variance route; 0 uses the cost-route count.
  std::size_t variance_replicas = 0;
};

ScalingReport threshold_estimate(const ProcessModel& model, std::span<const double> p_grid,
                                 std::span<const double> n_grid, std::size_t replicas, std::uint64_t seed,
                                 const ThresholdOptions& options = {});

}  // namespace otlab
