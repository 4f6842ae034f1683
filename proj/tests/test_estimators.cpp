#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "otlab/error.hpp"
#include "otlab/estimators.hpp"
#include "otlab/samplers.hpp"

using namespace otlab;

namespace {

CostCurve synthetic(const std::function<double(double)>& f) {
  CostCurve c;
  for (int k = 3; k <= 14; ++k) {
    const double n = std::ldexp(1.0, k);
    c.n.push_back(n);
    c.mean.push_back(f(n));
    c.se.push_back(0.01 * f(n));
  }
  c.replicas = 1000;
  return c;
}

}  // namespace

TEST(VarianceCurve, PoissonVarianceIsN) {
  const double grid[] = {8, 32, 128, 512};
  const auto c = variance_curve(Poisson{}, grid, 10000, 1);
  ASSERT_EQ(c.kind, CurveKind::variance);
  for (std::size_t i = 0; i < c.n.size(); ++i) EXPECT_NEAR(c.mean[i], c.n[i], 0.05 * c.n[i]) << c.n[i];
}

TEST(VarianceCurve, PerturbedLatticeIsBounded) {
  const double grid[] = {8, 16, 32, 64, 128, 256, 512};
  const auto c = variance_curve(PerturbedLattice{0.5}, grid, 2000, 2);
  const auto [lo, hi] = std::minmax_element(c.mean.begin(), c.mean.end());
  EXPECT_LT(*hi / *lo, 3.0);
}

TEST(VarianceCurve, SineIncrementsPerOctaveLevelOff) {
  const double grid[] = {2, 4, 8, 16, 32, 64};
  const auto c = variance_curve(SineKernelDPP{8}, grid, 400, 3);
  // Var ~ log(n) / pi^2: each octave adds about log(2) / pi^2 = 0.070.
  for (std::size_t i = 2; i < c.n.size(); ++i) {
    const double inc = c.mean[i] - c.mean[i - 1];
    const double se = std::hypot(c.se[i], c.se[i - 1]);
    EXPECT_NEAR(inc, std::log(2.0) / (std::numbers::pi * std::numbers::pi), 4.0 * se + 0.02) << c.n[i];
  }
  EXPECT_EQ(fit_growth(c).preferred, GrowthModel::logarithmic);
}

TEST(GrowthFit, ZeroCurveIsBounded) {
  CostCurve c = synthetic([](double) { return 0.0; });
  for (double& s : c.se) s = 0.0;
  const auto g = fit_growth(c);
  EXPECT_EQ(g.gamma, 0.0);
  EXPECT_EQ(g.p_star, 1.0);
  c.mean[3] = 1.0;
  EXPECT_THROW(fit_growth(c), InvalidArgument);
}

TEST(VarianceCurve, RequiresEnoughReplicas) {
  const double grid[] = {8};
  EXPECT_THROW(variance_curve(Poisson{}, grid, 50, 1), InvalidArgument);
}

TEST(CentralMoment, PoissonMeanAbsoluteDeviation) {
  const double grid[] = {256};
  const auto c = central_moment_curve(Poisson{}, grid, 10000, 4);
  ASSERT_EQ(c.kind, CurveKind::absdev);
  const double expected = std::sqrt(2.0 * 256.0 / std::numbers::pi);
  EXPECT_NEAR(c.mean[0], expected, 0.03 * expected);
}

TEST(CentralMoment, LatticeStaysWithinOne) {
  const double grid[] = {3.5, 16, 100.25, 1024};
  const auto c = central_moment_curve(PerturbedLattice{0.0}, grid, 200, 5);
  for (double v : c.mean) EXPECT_LE(v, 1.0);
}

TEST(CostCurve, LatticeSlopeIsZero) {
  const double grid[] = {8, 16, 32, 64};
  EstimatorOptions opt;
  opt.delta = 1.0 / 16.0;
  for (double p : {0.3, 0.7}) {
    const auto c = cost_curve(PerturbedLattice{0.0}, p, grid, 100, 6, opt);
    EXPECT_NEAR(classify_cost_curve(c, 0.05).slope, 0.0, 0.02) << p;
  }
}

TEST(CostCurve, PoissonSlopesBracketOneHalf) {
  // Small windows still show the approach to the limit at p = 0.3; the
  // fitted slope drops below 0.05 once the grid reaches n = 512.
  const double grid[] = {16, 32, 64, 128, 256, 512};
  EstimatorOptions opt;
  opt.delta = 1.0;
  const auto lo = classify_cost_curve(cost_curve(Poisson{}, 0.3, grid, 100, 7, opt), 0.05);
  EXPECT_LE(lo.slope, 0.05);
  EXPECT_FALSE(lo.growing);
  const auto hi = classify_cost_curve(cost_curve(Poisson{}, 0.7, grid, 100, 7, opt), 0.05);
  EXPECT_NEAR(hi.slope, 0.2, 0.1);
  EXPECT_TRUE(hi.growing);
}

TEST(CostCurve, RejectsBadExponent) {
  const double grid[] = {8};
  EXPECT_THROW(cost_curve(Poisson{}, 1.5, grid, 100, 1), InvalidArgument);
  EXPECT_THROW(cost_curve(Poisson{}, 0.0, grid, 100, 1), InvalidArgument);
}

TEST(Clt, PoissonIsGaussian) {
  const auto r = clt_diagnostic(Poisson{}, 4096.0, 10000, 8);
  EXPECT_GT(r.pvalue, 0.01);
  EXPECT_TRUE(r.consistent);
}

TEST(Clt, SineIsGaussianAtDeskScale) {
  const auto r = clt_diagnostic(SineKernelDPP{8}, 256.0, 1000, 9);
  EXPECT_GT(r.pvalue, 0.001);
}

TEST(Clt, LatticeIsDegenerate) {
  EXPECT_THROW(clt_diagnostic(PerturbedLattice{0.0}, 64.0, 1000, 10), InvalidArgument);
  const auto r = clt_diagnostic(PerturbedLattice{0.0}, 64.0, 1000, 10, {}, true);
  EXPECT_EQ(r.pvalue, 0.0);
  EXPECT_FALSE(r.consistent);
}

TEST(RegularVariance, LinearIsRegular) {
  const auto c = synthetic([](double n) { return n; });
  const auto rep = regular_variance_check(c.n, c.mean);
  EXPECT_TRUE(rep.regular());
  for (const auto& row : rep.power_sequence) EXPECT_NEAR(row.ratio, row.a_n / row.n, 1e-9);
}

TEST(RegularVariance, LogarithmicFailsPowerSequence) {
  const auto c = synthetic([](double n) { return std::log(n); });
  const auto rep = regular_variance_check(c.n, c.mean);
  EXPECT_FALSE(rep.power_decreasing);
  EXPECT_FALSE(rep.regular());
  EXPECT_NEAR(rep.power_sequence.back().ratio, 0.8, 0.01);
}

TEST(RegularVariance, BoundedIsNotRegular) {
  const auto c = synthetic([](double) { return 2.0; });
  const auto rep = regular_variance_check(c.n, c.mean);
  EXPECT_FALSE(rep.regular());
  for (const auto& row : rep.log_sequence) EXPECT_NEAR(row.ratio, 1.0, 1e-12);
}

TEST(GrowthFit, RecoversSyntheticExponents) {
  const auto pw = fit_growth(synthetic([](double n) { return 3.0 * std::pow(n, 1.5); }));
  EXPECT_EQ(pw.preferred, GrowthModel::power);
  EXPECT_NEAR(pw.gamma, 1.5, 1e-9);
  EXPECT_NEAR(pw.p_star, 0.25, 1e-9);
  EXPECT_LE(pw.gamma_lo, pw.gamma);
  EXPECT_GE(pw.gamma_hi, pw.gamma);
  const auto lg = fit_growth(synthetic([](double n) { return 0.1 * std::log(n) + 0.3; }));
  EXPECT_EQ(lg.preferred, GrowthModel::logarithmic);
  EXPECT_NEAR(lg.log_coef, 0.1, 1e-9);
  EXPECT_EQ(lg.p_star, 1.0);
}

TEST(CostRoute, ThresholdRule) {
  auto cls = [](double p, bool g) {
    CostClassification c;
    c.p = p;
    c.growing = g;
    return c;
  };
  const std::vector<CostClassification> mixed{cls(0.2, false), cls(0.4, false), cls(0.6, true), cls(0.8, true)};
  EXPECT_DOUBLE_EQ(cost_route_threshold(mixed), 0.5);
  const std::vector<CostClassification> bounded{cls(0.2, false), cls(0.8, false)};
  EXPECT_DOUBLE_EQ(cost_route_threshold(bounded), 0.8);
  const std::vector<CostClassification> growing{cls(0.2, true), cls(0.8, true)};
  EXPECT_DOUBLE_EQ(cost_route_threshold(growing), 0.2);
}

TEST(Threshold, VarianceRoutePredictions) {
  const double p_grid[] = {0.5};
  const double n_grid[] = {64, 128, 256, 512, 1024, 2048, 4096};
  ThresholdOptions opt;
  opt.cost_route = false;
  EXPECT_NEAR(threshold_estimate(Poisson{}, p_grid, n_grid, 2000, 11, opt).variance_p_star, 0.5, 0.05);
  EXPECT_NEAR(threshold_estimate(HeavyTailRenewal{1.5}, p_grid, n_grid, 2000, 11, opt).variance_p_star, 0.25,
              0.08);
  const auto r = threshold_estimate(Poisson{}, p_grid, n_grid, 2000, 11, opt);
  EXPECT_TRUE(std::isnan(r.cost_p_star));
}

// Invariants

TEST(EstimatorProperties, NestedWindowsShareOnePath) {
  // Only the largest window is sampled, so a grid point's value does not
  // depend on which smaller windows are also requested.
  const double a[] = {16, 128};
  const double b[] = {32, 64, 128};
  const auto ca = variance_curve(Poisson{}, a, 200, 12);
  const auto cb = variance_curve(Poisson{}, b, 200, 12);
  EXPECT_EQ(ca.mean.back(), cb.mean.back());
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto cfg = sample_poisson(WindowSpec::interval(128.0), {12, r});
    std::size_t prev = 0;
    for (double n : b) {
      const std::size_t c = cfg.count(0.0, n);
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
}

TEST(EstimatorProperties, DoublingReplicasShrinksErrorsBySqrtTwo) {
  const double grid[] = {64, 256};
  const auto c1 = variance_curve(Poisson{}, grid, 4000, 13);
  const auto c2 = variance_curve(Poisson{}, grid, 8000, 14);
  for (std::size_t i = 0; i < c1.n.size(); ++i)
    EXPECT_NEAR(c1.se[i] / c2.se[i], std::sqrt(2.0), 0.15 * std::sqrt(2.0)) << c1.n[i];
}

TEST(EstimatorProperties, BitStableAcrossThreadCounts) {
  const double grid[] = {16, 32, 64};
  EstimatorOptions one, four;
  one.threads = 1;
  four.threads = 4;
  EXPECT_EQ(variance_curve(Poisson{}, grid, 300, 15, one).mean, variance_curve(Poisson{}, grid, 300, 15, four).mean);
  one.delta = four.delta = 0.25;
  const auto a = cost_curve(Poisson{}, 0.5, grid, 20, 15, one);
  const auto b = cost_curve(Poisson{}, 0.5, grid, 20, 15, four);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.se, b.se);
}

TEST(EstimatorProperties, RoutesAgreeForPoissonAndLattice) {
  const double p_grid[] = {0.3, 0.7};
  const double n_grid[] = {16, 32, 64, 128};
  ThresholdOptions opt;
  opt.estimator.delta = 0.25;
  opt.variance_replicas = 2000;
  const auto poisson = threshold_estimate(Poisson{}, p_grid, n_grid, 100, 16, opt);
  EXPECT_NEAR(poisson.cost_p_star, poisson.variance_p_star, 0.1);
  EXPECT_TRUE(poisson.routes_agree);
  const double lp_grid[] = {0.3, 0.9};
  const auto lattice = threshold_estimate(PerturbedLattice{0.0}, lp_grid, n_grid, 100, 16, opt);
  EXPECT_NEAR(lattice.cost_p_star, lattice.variance_p_star, 0.1);
  EXPECT_TRUE(lattice.routes_agree);
}
