#include "otlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "otlab/error.hpp"
#include "otlab/parallel.hpp"
#include "otlab/samplers.hpp"
#include "otlab/stats.hpp"
#include "otlab/transport.hpp"

namespace otlab {
namespace {

void check_grid(std::span<const double> n_grid) {
  require(!n_grid.empty(), "window grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    require(std::isfinite(n_grid[i]) && n_grid[i] > 0.0, "window sizes must be positive");
    require(i == 0 || n_grid[i - 1] < n_grid[i], "window grid must be strictly increasing");
  }
}

// Window holding every grid window: the largest interval, or for torus-only
// models a torus of twice that circumference.
WindowSpec sampling_window(const ProcessModel& model, double n_max) {
  if (supports_interval(model)) return WindowSpec::interval(n_max);
  return WindowSpec::torus(std::ceil(2.0 * n_max));
}

CostCurve make_curve(CurveKind kind, const ProcessModel& model, std::span<const double> n_grid,
                     std::size_t replicas, std::uint64_t seed) {
  CostCurve c;
  c.kind = kind;
  c.n.assign(n_grid.begin(), n_grid.end());
  c.replicas = replicas;
  c.model = to_string(model);
  c.seed = seed;
  c.replica_values.assign(replicas * n_grid.size(), 0.0);
  return c;
}

void finish_curve(CostCurve& c) {
  const std::size_t g = c.n.size();
  c.mean.assign(g, 0.0);
  c.se.assign(g, 0.0);
  std::vector<double> column(c.replicas);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t r = 0; r < c.replicas; ++r) column[r] = c.value(r, i);
    const auto s = summarize(column);
    c.mean[i] = s.mean;
    c.se[i] = s.se;
  }
}

// counts[r][i] holds the translate counts of replica r for grid point i.
using TranslateCounts = std::vector<std::vector<std::vector<double>>>;

TranslateCounts translate_counts(const ProcessModel& model, std::span<const double> n_grid, std::size_t replicas,
                                 std::uint64_t seed, int threads) {
  const double n_max = n_grid.back();
  const WindowSpec window = sampling_window(model, n_max);
  TranslateCounts counts(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    const auto cfg = sample(model, window, {seed, r});
    auto& row = counts[r];
    row.resize(n_grid.size());
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      const auto translates = static_cast<std::size_t>(std::floor(n_max / n_grid[i] + 1e-9));
      row[i].resize(std::max<std::size_t>(translates, 1));
      for (std::size_t j = 0; j < row[i].size(); ++j)
        row[i][j] = static_cast<double>(cfg.count(n_grid[i] * static_cast<double>(j), n_grid[i] * static_cast<double>(j + 1)));
    }
  });
  return counts;
}

}  // namespace

const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::variance: return "variance";
    case CurveKind::absdev: return "absdev";
    case CurveKind::cost: return "cost";
  }
  return "?";
}

CostCurve variance_curve(const ProcessModel& model, std::span<const double> n_grid, std::size_t replicas,
                         std::uint64_t seed, const EstimatorOptions& options) {
  check_grid(n_grid);
  require(replicas >= 100, "variance curves need at least 100 replicas");
  const auto counts = translate_counts(model, n_grid, replicas, seed, options.threads);
  auto curve = make_curve(CurveKind::variance, model, n_grid, replicas, seed);
  const double scale = static_cast<double>(replicas) / static_cast<double>(replicas - 1);
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const std::size_t translates = counts[0][i].size();
    std::vector<double> centre(translates, 0.0);
    for (std::size_t r = 0; r < replicas; ++r)
      for (std::size_t j = 0; j < translates; ++j) centre[j] += counts[r][i][j];
    for (double& m : centre) m /= static_cast<double>(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < translates; ++j) acc += (counts[r][i][j] - centre[j]) * (counts[r][i][j] - centre[j]);
      curve.replica_values[r * n_grid.size() + i] = scale * acc / static_cast<double>(translates);
    }
  }
  finish_curve(curve);
  return curve;
}

CostCurve central_moment_curve(const ProcessModel& model, std::span<const double> n_grid, std::size_t replicas,
                               std::uint64_t seed, const EstimatorOptions& options) {
  check_grid(n_grid);
  require(replicas >= 100, "central moment curves need at least 100 replicas");
  const auto counts = translate_counts(model, n_grid, replicas, seed, options.threads);
  auto curve = make_curve(CurveKind::absdev, model, n_grid, replicas, seed);
  for (std::size_t r = 0; r < replicas; ++r)
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      double acc = 0.0;
      for (double c : counts[r][i]) acc += std::abs(n_grid[i] - c);
      curve.replica_values[r * n_grid.size() + i] = acc / static_cast<double>(counts[r][i].size());
    }
  finish_curve(curve);
  return curve;
}

CostCurve cost_curve(const ProcessModel& model, double p, std::span<const double> n_grid, std::size_t replicas,
                     std::uint64_t seed, const EstimatorOptions& options) {
  check_grid(n_grid);
  CostSpec{p}.validate();
  require(replicas >= 2, "cost curves need at least 2 replicas");
  if (!supports_interval(model)) throw InvalidArgument("cost curves need a model sampled on an interval");
  cells_per_unit(options.delta);
  auto curve = make_curve(CurveKind::cost, model, n_grid, replicas, seed);
  curve.p = p;
  curve.delta = options.delta;
  const double n_max = n_grid.back();
  parallel_for(replicas, options.threads, [&](std::size_t r) {
    const auto cfg = sample(model, WindowSpec::interval(n_max), {seed, r});
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      const double n = n_grid[i];
      const auto atoms = cfg.restrict_to(0.0, n);
      try {
        const double L0 = options.initial_padding > 0.0 ? options.initial_padding : default_padding(n);
        const auto plan = adaptive_padding(atoms, n, CostSpec{p}, options.delta, L0);
        curve.replica_values[r * n_grid.size() + i] = plan.total_cost / n;
      } catch (const Error& e) {
        std::ostringstream os;
        os << "cost curve replica " << r << " (seed " << seed << "), n = " << n << ": " << e.what();
        throw SolverFailure(os.str());
      }
    }
  });
  finish_curve(curve);
  return curve;
}

CltResult clt_from_counts(double n, std::span<const double> counts, std::uint64_t jitter_seed) {
  const auto raw = summarize(counts);
  CltResult res;
  res.n = n;
  res.mean = raw.mean;
  res.sd = std::sqrt(raw.variance);
  if (!(res.sd > 0.0)) {
    res.ks = 1.0;
    res.pvalue = 0.0;
    return res;
  }
  Stream rng({jitter_seed, 0}, 0x51);
  std::vector<double> z(counts.begin(), counts.end());
  for (double& v : z) v += rng.uniform() - 0.5;
  const auto s = summarize(z);
  const double sd = std::sqrt(s.variance);
  for (double& v : z) v = (v - s.mean) / sd;
  res.ks = ks_statistic(std::move(z), normal_cdf);
  res.pvalue = ks_pvalue(res.ks, counts.size());
  res.consistent = res.pvalue > 0.01;
  return res;
}

CltResult clt_diagnostic(const ProcessModel& model, double n, std::size_t replicas, std::uint64_t seed,
                         const EstimatorOptions& options, bool allow_degenerate) {
  require(replicas >= 2, "CLT diagnostic needs at least 2 replicas");
  require(std::isfinite(n) && n > 0.0, "window size must be positive");
  const WindowSpec window = sampling_window(model, n);
  std::vector<double> counts(replicas);
  parallel_for(replicas, options.threads, [&](std::size_t r) {
    counts[r] = static_cast<double>(sample(model, window, {seed, r}).count(0.0, n));
  });
  auto res = clt_from_counts(n, counts, seed);
  if (!(res.sd > 0.0) && !allow_degenerate)
    throw InvalidArgument("CLT diagnostic: counts have zero sample standard deviation");
  return res;
}

RegularVarianceReport regular_variance_check(std::span<const double> n, std::span<const double> f) {
  require(n.size() == f.size() && n.size() >= 2, "regular variance check needs a curve with two or more points");
  for (std::size_t i = 0; i < n.size(); ++i)
    require(f[i] > 0.0 && n[i] > 1.0 && (i == 0 || n[i] > n[i - 1]), "regular variance check needs f > 0 on an increasing grid");
  auto interp = [&](double x) {
    const double lx = std::log(x);
    std::size_t k = 1;
    while (k + 1 < n.size() && std::log(n[k]) < lx) ++k;
    const double x0 = std::log(n[k - 1]), x1 = std::log(n[k]);
    const double t = (lx - x0) / (x1 - x0);
    return std::exp((1.0 - t) * std::log(f[k - 1]) + t * std::log(f[k]));
  };
  auto build = [&](auto a_of, std::vector<RatioRow>& rows) {
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double a = a_of(n[i]);
      if (a < n.front() || a >= n[i]) continue;
      rows.push_back({n[i], a, interp(a) / f[i]});
    }
    if (rows.size() < 2) return false;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].ratio > rows[i - 1].ratio + 0.02) return false;
    return rows.back().ratio <= 0.9 * rows.front().ratio;
  };
  RegularVarianceReport rep;
  rep.power_decreasing = build([](double x) { return std::floor(std::pow(x, 0.8)); }, rep.power_sequence);
  rep.log_decreasing = build([](double x) { return std::floor(x / std::log(x)); }, rep.log_sequence);
  return rep;
}

GrowthFit fit_growth(const CostCurve& curve) {
  const std::size_t g = curve.n.size();
  require(g >= 3, "growth fits need at least three grid points");
  if (std::all_of(curve.mean.begin(), curve.mean.end(), [](double v) { return v == 0.0; })) {
    // Deterministic counts: bounded, reported as exponent 0.
    GrowthFit zero;
    zero.p_star = 1.0;
    return zero;
  }
  std::vector<double> ln(g), lf(g), f(g), w_log(g), w_lin(g);
  bool exact = true;
  for (std::size_t i = 0; i < g; ++i) {
    require(curve.mean[i] > 0.0, "growth fits need a positive curve");
    ln[i] = std::log(curve.n[i]);
    lf[i] = std::log(curve.mean[i]);
    f[i] = curve.mean[i];
    exact = exact && curve.se[i] > 0.0;
  }
  for (std::size_t i = 0; i < g; ++i) {
    const double rel = exact ? curve.se[i] / curve.mean[i] : 1.0;
    w_log[i] = 1.0 / (rel * rel);
    w_lin[i] = exact ? 1.0 / (curve.se[i] * curve.se[i]) : 1.0;
  }
  GrowthFit fit;
  const auto power = fit_linear(ln, lf, w_log);
  fit.gamma = power.slope;
  std::tie(fit.gamma_lo, fit.gamma_hi) = power.slope_ci();
  fit.rss_power = power.rss;

  const auto logf = fit_linear(ln, f, w_lin);
  fit.log_coef = logf.slope;
  fit.log_intercept = logf.intercept;
  std::tie(fit.log_lo, fit.log_hi) = logf.slope_ci();
  fit.rss_log = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double pred = logf.intercept + logf.slope * ln[i];
    if (!(pred > 0.0)) {
      fit.rss_log = std::numeric_limits<double>::infinity();
      break;
    }
    const double r = lf[i] - std::log(pred);
    fit.rss_log += w_log[i] * r * r;
  }
  fit.preferred = fit.rss_log < fit.rss_power ? GrowthModel::logarithmic : GrowthModel::power;
  fit.p_star = fit.preferred == GrowthModel::power ? std::clamp(1.0 - fit.gamma / 2.0, 0.0, 1.0) : 1.0;
  return fit;
}

CostClassification classify_cost_curve(const CostCurve& curve, double tolerance) {
  require(curve.kind == CurveKind::cost, "classification needs a cost curve");
  const std::size_t g = curve.n.size();
  std::vector<double> ln(g), lc(g), w(g);
  for (std::size_t i = 0; i < g; ++i) {
    require(curve.mean[i] > 0.0, "cost curve must be positive");
    ln[i] = std::log(curve.n[i]);
    lc[i] = std::log(curve.mean[i]);
    const double rel = curve.se[i] > 0.0 ? curve.se[i] / curve.mean[i] : 1.0;
    w[i] = 1.0 / (rel * rel);
  }
  const auto fit = fit_linear(ln, lc, w);
  CostClassification c;
  c.p = curve.p;
  c.slope = fit.slope;
  std::tie(c.slope_lo, c.slope_hi) = fit.slope_ci();
  c.growing = c.slope_lo > tolerance;
  return c;
}

double cost_route_threshold(std::span<const CostClassification> classes) {
  require(!classes.empty(), "no cost classifications");
  std::vector<CostClassification> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
  auto first_growing = std::find_if(sorted.begin(), sorted.end(), [](const auto& c) { return c.growing; });
  if (first_growing == sorted.end()) return sorted.back().p;
  if (first_growing == sorted.begin()) return sorted.front().p;
  return 0.5 * (std::prev(first_growing)->p + first_growing->p);
}

ScalingReport threshold_estimate(const ProcessModel& model, std::span<const double> p_grid,
                                 std::span<const double> n_grid, std::size_t replicas, std::uint64_t seed,
                                 const ThresholdOptions& options) {
  for (double p : p_grid) require(p > 0.0 && p < 1.0, "threshold p grid must lie in (0, 1)");
  ScalingReport rep;
  rep.model = to_string(model);
  rep.seed = seed;
  rep.replicas = replicas;
  rep.delta = options.estimator.delta;
  rep.slope_tolerance = options.slope_tolerance;

  const std::size_t var_replicas = options.variance_replicas ? options.variance_replicas : replicas;
  rep.variance = variance_curve(model, n_grid, var_replicas, seed, options.estimator);
  rep.growth = fit_growth(rep.variance);
  rep.variance_p_star = rep.growth.p_star;
  const bool degenerate = rep.growth.rss_power == 0.0 && rep.variance.mean.front() == 0.0;
  if (!degenerate) rep.regular_variance = regular_variance_check(rep.variance.n, rep.variance.mean);

  // CLT diagnostic per n, from the nested prefix counts of the same paths.
  const WindowSpec window = sampling_window(model, n_grid.back());
  std::vector<std::vector<double>> counts(n_grid.size(), std::vector<double>(var_replicas));
  parallel_for(var_replicas, options.estimator.threads, [&](std::size_t r) {
    const auto cfg = sample(model, window, {seed, r});
    for (std::size_t i = 0; i < n_grid.size(); ++i) counts[i][r] = static_cast<double>(cfg.count(0.0, n_grid[i]));
  });
  bool clt_all = true;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    rep.clt.push_back(clt_from_counts(n_grid[i], counts[i], seed));
    clt_all = clt_all && rep.clt.back().consistent;
  }

  rep.cost_p_star = std::numeric_limits<double>::quiet_NaN();
  if (options.cost_route && !p_grid.empty()) {
    for (double p : p_grid) {
      rep.cost_curves.push_back(cost_curve(model, p, n_grid, replicas, seed, options.estimator));
      rep.cost_classes.push_back(classify_cost_curve(rep.cost_curves.back(), options.slope_tolerance));
    }
    rep.cost_p_star = cost_route_threshold(rep.cost_classes);
    rep.routes_agree = std::abs(rep.cost_p_star - rep.variance_p_star) <= 0.1;
  }

  std::ostringstream why;
  if (degenerate) why << "zero count variance at every n; ";
  why << (rep.growth.preferred == GrowthModel::power ? "power-law" : "logarithmic") << " variance growth";
  if (rep.growth.preferred == GrowthModel::power) why << " (gamma = " << rep.growth.gamma << ")";
  why << "; finiteness below p* rests on the variance growth alone; divergence above p* also needs regular variance ("
      << (rep.regular_variance.regular() ? "holds" : "fails") << ") and a CLT for the counts ("
      << (clt_all ? "consistent at every n" : "rejected at some n") << ")";
  if (!(rep.regular_variance.regular() && clt_all)) why << ", so the upper verdict is not backed by these hypotheses";
  rep.justification = why.str();
  return rep;
}

}  // namespace otlab
