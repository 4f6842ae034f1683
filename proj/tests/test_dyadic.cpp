#include <gtest/gtest.h>

#include <cmath>

#include "otlab/dyadic.hpp"
#include "otlab/error.hpp"
#include "otlab/estimators.hpp"
#include "otlab/samplers.hpp"
#include "support/dense_lp.hpp"

using namespace otlab;

namespace {

// Exact discrete repair cost: cells of [0, z + z') against cells of
// [0, z) and [half, half + z'), translation cost |c - c'|^p.
double repair_lp(long long z, long long zp, double half, double delta, double p) {
  std::vector<double> from, to;
  for (double x = 0.5 * delta; x < static_cast<double>(z + zp); x += delta) from.push_back(x);
  for (double x = 0.5 * delta; x < static_cast<double>(z); x += delta) to.push_back(x);
  for (double x = half + 0.5 * delta; x < half + static_cast<double>(zp); x += delta) to.push_back(x);
  std::vector<double> s(from.size(), delta), d(to.size(), delta);
  std::vector<std::vector<double>> cost(from.size(), std::vector<double>(to.size()));
  for (std::size_t i = 0; i < from.size(); ++i)
    for (std::size_t j = 0; j < to.size(); ++j) cost[i][j] = std::pow(std::abs(from[i] - to[j]), p);
  return oracle::balanced_lp(s, d, cost).value;
}

}  // namespace

TEST(Dyadic, LatticeHasNoRepairs) {
  std::vector<double> pts;
  for (int j = 0; j < 8; ++j) pts.push_back(j + 0.5);
  for (double p : {0.3, 0.7}) {
    const auto ledger = build_dyadic(pts, 3, p, 1.0 / 16.0);
    ASSERT_EQ(ledger.levels.size(), 4u);
    for (const auto& lv : ledger.levels) {
      EXPECT_EQ(lv.z, 1LL << lv.k);
      EXPECT_NEAR(lv.repair_cost, 0.0, 1e-12);
      EXPECT_NEAR(lv.cbar, std::pow(2.0, -p) / (p + 1.0), 1e-12);
    }
  }
}

TEST(Dyadic, RepairOfFullLeftBlockIsFree) {
  const std::vector<double> pts{0.3, 0.6};
  const auto ledger = build_dyadic(pts, 1, 0.5, 1.0 / 8.0);
  EXPECT_EQ(ledger.levels[0].z, 2);
  EXPECT_EQ(ledger.levels[0].z_prime, 0);
  EXPECT_NEAR(ledger.levels[0].repair_cost, 0.0, 1e-12);
}

TEST(Dyadic, RepairMatchesLpOracle) {
  const double delta = 1.0 / 8.0;
  struct Case {
    std::vector<double> pts;
    long long z, zp;
  };
  const std::vector<Case> cases{{{1.3, 1.7}, 0, 2}, {{0.5, 1.2, 1.8}, 1, 2}, {{0.1, 0.4, 0.8, 1.5}, 3, 1}};
  for (double p : {0.3, 0.5, 0.8}) {
    for (const auto& c : cases) {
      const auto ledger = build_dyadic(c.pts, 1, p, delta);
      ASSERT_EQ(ledger.levels[0].z, c.z);
      ASSERT_EQ(ledger.levels[0].z_prime, c.zp);
      EXPECT_NEAR(ledger.levels[0].repair_cost, repair_lp(c.z, c.zp, 1.0, delta, p), 1e-9);
    }
  }
}

TEST(Dyadic, RepairApproachesReversalClosedForm) {
  // Z_0 = 0, Z'_0 = 2: [0, 1) moves onto [2, 3) in reverse order, so the
  // continuum cost is ((g + 2l)^{p+1} - g^{p+1}) / (2 (p + 1)) with g = l = 1.
  const std::vector<double> pts{1.3, 1.7};
  for (double p : {0.3, 0.6}) {
    const double closed = (std::pow(3.0, p + 1.0) - 1.0) / (2.0 * (p + 1.0));
    const auto ledger = build_dyadic(pts, 1, p, 1.0 / 64.0);
    EXPECT_NEAR(ledger.levels[0].repair_cost, closed, 0.01 * closed);
  }
}

TEST(Dyadic, TelescopingAndCountAdditivity) {
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto cfg = sample_poisson(WindowSpec::interval(32.0), {8, r});
    const auto ledger = build_dyadic(cfg.points, 5, 0.4, 1.0 / 16.0);
    EXPECT_NEAR(ledger.total_cost, ledger.level0_cost + ledger.repair_total, 1e-9 * std::max(1.0, ledger.total_cost));
    for (int k = 0; k < 5; ++k) {
      const auto& lv = ledger.levels[k];
      EXPECT_EQ(ledger.levels[k + 1].z, lv.z + lv.z_prime);
      for (std::size_t b = 0; b < ledger.levels[k + 1].block_counts.size(); ++b)
        EXPECT_EQ(ledger.levels[k + 1].block_counts[b], lv.block_counts[2 * b] + lv.block_counts[2 * b + 1]);
      EXPECT_GE(lv.cbar, 0.0);
    }
    EXPECT_EQ(ledger.levels[5].z, static_cast<long long>(cfg.size()));
  }
}

TEST(Dyadic, RejectsBadArguments) {
  const std::vector<double> pts{0.5};
  EXPECT_THROW(build_dyadic(pts, 0, 0.5, 0.25), InvalidArgument);
  EXPECT_THROW(build_dyadic(pts, 1, 1.0, 0.25), InvalidArgument);
  const std::vector<double> outside{2.5};
  EXPECT_THROW(build_dyadic(outside, 1, 0.5, 0.25), InvalidArgument);
}

TEST(DyadicProperties, BoundDominatesIncrementsForEveryIntervalModel) {
  const std::vector<std::pair<std::string, std::size_t>> models{{"poisson", 300},
                                                                {"lattice:sigma=0.5", 300},
                                                                {"renewal:law=gamma,shape=4", 300},
                                                                {"heavytail:alpha=1.5", 300},
                                                                {"sine:m=8", 100}};
  for (const auto& [spec, R] : models) {
    for (double p : {0.3, 0.45}) {
      const auto s = dyadic_experiment(parse_model(spec), 8, p, R, 31, 1.0 / 16.0);
      EXPECT_LT(s.telescoping_error, 1e-8);
      for (const auto& row : s.rows) {
        if (row.k == s.K) continue;
        EXPECT_LE(row.mean_increment, row.bound_term + 3.0 * row.se_increment)
            << spec << " p=" << p << " level " << row.k;
      }
    }
  }
}

TEST(DyadicSeries, LinearVarianceBelowOneHalfIsSummable) {
  std::vector<double> f;
  for (int k = 0; k <= 24; ++k) f.push_back(std::ldexp(1.0, k));
  EXPECT_TRUE(lemma_cvg_series(f, 0.3).summable);
  const auto rep = lemma_cvg_series(f, 0.7);
  EXPECT_FALSE(rep.summable);
  EXPECT_GT(rep.ratio, 1.0);
  // Second term grows like 2^{0.2 k}.
  EXPECT_NEAR(rep.ratio, std::pow(2.0, 0.2), 0.02);
}

TEST(DyadicSeries, LogVarianceIsSummableBelowOne) {
  std::vector<double> f;
  for (int k = 0; k <= 30; ++k) f.push_back(std::log(std::ldexp(1.0, k)));
  EXPECT_TRUE(lemma_cvg_series(f, 0.9).summable);
}

TEST(DyadicSeries, RejectsNegativeVariance) {
  const std::vector<double> f{1.0, -1.0};
  EXPECT_THROW(lemma_cvg_series(f, 0.5), InvalidArgument);
}

namespace {

CostCurve synthetic(const std::function<double(double)>& f) {
  CostCurve c;
  for (int k = 4; k <= 12; ++k) {
    const double n = std::ldexp(1.0, k);
    c.n.push_back(n);
    c.mean.push_back(f(n));
    c.se.push_back(0.01 * f(n));
  }
  c.replicas = 1000;
  return c;
}

}  // namespace

TEST(VarianceClassifier, PoissonIsFiniteBelowOneHalf) {
  const auto c = synthetic([](double n) { return n; });
  EXPECT_TRUE(theorem_i_classifier(c, 0.5).finite_below_p);
  EXPECT_FALSE(theorem_i_classifier(c, 0.6).finite_below_p);
}

TEST(VarianceClassifier, HeavyTailThresholdIsOneQuarter) {
  const auto c = synthetic([](double n) { return std::pow(n, 1.5); });
  EXPECT_TRUE(theorem_i_classifier(c, 0.25).finite_below_p);
  EXPECT_FALSE(theorem_i_classifier(c, 0.3).finite_below_p);
}

TEST(VarianceClassifier, BoundedVarianceIsFiniteBelowOne) {
  const double grid[] = {16, 32, 64, 128, 256};
  const auto c = variance_curve(parse_model("lattice:sigma=0.5"), grid, 2000, 5);
  EXPECT_TRUE(theorem_i_classifier(c, 0.99).finite_below_p);
  EXPECT_TRUE(theorem_i_classifier(c, 0.9).confident);
}
