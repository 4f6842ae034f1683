#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "otlab/circular_beta.hpp"
#include "otlab/error.hpp"
#include "otlab/estimators.hpp"
#include "otlab/samplers.hpp"
#include "otlab/stats.hpp"

using namespace otlab;

namespace {

std::vector<double> counts(const ProcessModel& m, double n, std::size_t R, std::uint64_t seed) {
  std::vector<double> out(R);
  for (std::size_t r = 0; r < R; ++r) out[r] = static_cast<double>(sample(m, WindowSpec::interval(n), {seed, r}).size());
  return out;
}

// Two-sample KS p-value through the asymptotic Kolmogorov law.
double two_sample_ks_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  return ks_pvalue(d, static_cast<std::size_t>(ne));
}

}  // namespace

TEST(Poisson, EmptyWindow) { EXPECT_EQ(sample_poisson(WindowSpec::interval(0.0), {1, 0}).size(), 0u); }

TEST(Poisson, CountMeanAndVariance) {
  const auto c = counts(Poisson{}, 64.0, 100000, 17);
  const auto s = summarize(c);
  EXPECT_NEAR(s.mean, 64.0, 3.0 * std::sqrt(64.0 / 1e5));
  EXPECT_NEAR(s.variance, 64.0, 0.05 * 64.0);
}

TEST(Samplers, ReproducibleForEveryModel) {
  for (const char* spec : {"poisson", "lattice:sigma=0.5", "renewal:law=gamma,shape=4", "heavytail:alpha=1.5",
                           "sine:m=8"}) {
    const auto m = parse_model(spec);
    const auto a = sample(m, WindowSpec::interval(12.0), {99, 4});
    const auto b = sample(m, WindowSpec::interval(12.0), {99, 4});
    EXPECT_EQ(a.points, b.points) << spec;
    const auto c = sample(m, WindowSpec::interval(12.0), {99, 5});
    EXPECT_NE(a.points, c.points) << spec;
  }
  EXPECT_EQ(sample_circular_beta(16, 2.0, {3, 1}).points, sample_circular_beta(16, 2.0, {3, 1}).points);
}

TEST(Samplers, PointsSortedInsideWindow) {
  for (const char* spec : {"poisson", "lattice:sigma=2", "renewal:law=uniform", "heavytail:alpha=1.2", "sine:m=8"}) {
    const auto cfg = sample(parse_model(spec), WindowSpec::interval(20.0), {1, 2});
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      EXPECT_GE(cfg.points[i], 0.0);
      EXPECT_LT(cfg.points[i], 20.0);
      if (i) EXPECT_LT(cfg.points[i - 1], cfg.points[i]);
    }
  }
}

TEST(Samplers, TopologyRestrictions) {
  EXPECT_THROW(sample(parse_model("cbeta:beta=2"), WindowSpec::interval(8.0), {1, 0}), InvalidArgument);
  EXPECT_THROW(sample(parse_model("sine:m=16"), WindowSpec::torus(8.0), {1, 0}), InvalidArgument);
  EXPECT_EQ(sample(parse_model("cbeta:beta=2"), WindowSpec::torus(8.0), {1, 0}).size(), 8u);
}

TEST(Samplers, TieSeparation) {
  std::vector<double> v{1.0, 0.5, 1.0, 1.0};
  sort_and_separate(v);
  EXPECT_EQ(v[0], 0.5);
  EXPECT_EQ(v[1], 1.0);
  EXPECT_EQ(v[2], 1.0 + 1e-12);
  EXPECT_EQ(v[3], 1.0 + 2e-12);
}

TEST(ProcessModel, ParseAndValidate) {
  for (const char* spec : {"poisson", "lattice:sigma=0.5", "renewal:law=gamma,shape=4", "heavytail:alpha=1.5",
                           "sine:m=32", "cbeta:beta=2"})
    EXPECT_EQ(to_string(parse_model(to_string(parse_model(spec)))), to_string(parse_model(spec)));
  EXPECT_THROW(parse_model("lattice:sigma=-1"), InvalidArgument);
  EXPECT_THROW(parse_model("heavytail:alpha=2.5"), InvalidArgument);
  EXPECT_THROW(parse_model("sine:m=4"), InvalidArgument);
  EXPECT_THROW(parse_model("cbeta:beta=0"), InvalidArgument);
  EXPECT_THROW(parse_model("poisson:rate=2"), InvalidArgument);
  EXPECT_THROW(parse_model("nosuch"), InvalidArgument);
}

TEST(PerturbedLattice, ZeroNoiseCountsAreFloorOrCeiling) {
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto c = sample_perturbed_lattice(WindowSpec::interval(10.5), 0.0, {2, r}).size();
    EXPECT_TRUE(c == 10u || c == 11u) << c;
  }
}

TEST(PerturbedLattice, VarianceStaysBounded) {
  const double v64 = summarize(counts(PerturbedLattice{0.5}, 64.0, 10000, 3)).variance;
  const double v256 = summarize(counts(PerturbedLattice{0.5}, 256.0, 10000, 4)).variance;
  EXPECT_LT(v256, 2.0 * v64);
  EXPECT_LT(v64, 2.0 * v256);
}

TEST(PerturbedLattice, VarianceExponentNearZero) {
  const double grid[] = {16, 32, 64, 128, 256, 512};
  const auto g = fit_growth(variance_curve(PerturbedLattice{0.5}, grid, 2000, 8));
  EXPECT_LT(g.gamma, 0.15);
}

TEST(Renewal, DeterministicGapsGiveShiftedLattice) {
  for (double n : {3.3, 10.0, 64.7}) {
    const auto s = summarize(counts(Renewal{InterarrivalLaw::deterministic()}, n, 4000, 5));
    EXPECT_LE(s.variance, 0.25 + 0.02) << n;
  }
}

TEST(Renewal, GammaVarianceRatio) {
  // Var(T) / E[T]^3 = 1/4 for Gamma(4) with unit mean.
  const Renewal m{InterarrivalLaw::gamma_unit_mean(4.0)};
  for (double n : {256.0, 512.0}) {
    const double v = summarize(counts(m, n, 10000, 6)).variance;
    EXPECT_NEAR(v / n, 0.25, 0.025) << n;
  }
}

TEST(Renewal, RejectsNonUnitMean) {
  InterarrivalLaw law = InterarrivalLaw::gamma_unit_mean(2.0);
  law.scale = 0.6;
  EXPECT_THROW(law.validate(), InvalidArgument);
  EXPECT_THROW(sample_renewal(WindowSpec::interval(4.0), law, {1, 0}), InvalidArgument);
}

TEST(HeavyTail, VarianceExponentIsThreeMinusAlpha) {
  const double grid[] = {64, 128, 256, 512, 1024, 2048, 4096};
  const auto g = fit_growth(variance_curve(HeavyTailRenewal{1.5}, grid, 2000, 9));
  EXPECT_EQ(g.preferred, GrowthModel::power);
  EXPECT_NEAR(g.gamma, 1.5, 0.15);
}

TEST(SineDpp, UnitIntensityOnUnitWindow) {
  const auto s = summarize(counts(SineKernelDPP{32}, 1.0, 10000, 10));
  EXPECT_NEAR(s.mean, 1.0, 0.02);
}

TEST(SineDpp, CountLawMatchesDiscreteKernel) {
  // m n = 64 grid points; the count of a discrete DPP is a sum of independent
  // Bernoulli(lambda_i) over the kernel eigenvalues.
  const int m = 16;
  const double n = 4.0;
  const int grid = 64;
  Eigen::MatrixXd K(grid, grid);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double d = std::numbers::pi * (i - j) / m;
      K(i, j) = (i == j ? 1.0 : std::sin(d) / d) / m;
    }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  ASSERT_EQ(eig.info(), Eigen::Success);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  std::vector<double> law{1.0};
  for (int i = 0; i < grid; ++i) {
    const double l = std::clamp(lambda(i), 0.0, 1.0);
    std::vector<double> next(law.size() + 1, 0.0);
    for (std::size_t k = 0; k < law.size(); ++k) {
      next[k] += law[k] * (1.0 - l);
      next[k + 1] += law[k] * l;
    }
    law = std::move(next);
  }
  const std::size_t R = 20000;
  std::vector<double> freq(law.size(), 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    const auto c = sample_sine_dpp(WindowSpec::interval(n), m, {12, r}).size();
    ASSERT_LT(c, freq.size());
    freq[c] += 1.0 / R;
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < law.size(); ++k) tv += 0.5 * std::abs(freq[k] - law[k]);
  EXPECT_LT(tv, 0.02);
}

TEST(SineDpp, RepulsionBeatsPoisson) {
  auto close_fraction = [](const ProcessModel& m) {
    std::size_t close = 0, gaps = 0;
    for (std::uint64_t r = 0; r < 400; ++r) {
      const auto cfg = sample(m, WindowSpec::interval(16.0), {13, r});
      for (std::size_t i = 1; i < cfg.size(); ++i, ++gaps) close += cfg.points[i] - cfg.points[i - 1] < 0.05;
    }
    return static_cast<double>(close) / static_cast<double>(gaps);
  };
  EXPECT_LT(close_fraction(SineKernelDPP{32}), 0.5 * close_fraction(Poisson{}));
}

TEST(CircularBeta, ExactlyNPointsOnTorus) {
  for (std::size_t N : {2u, 7u, 64u})
    for (double beta : {0.5, 2.0, 4.0}) {
      const auto cfg = sample_circular_beta(N, beta, {14, N});
      ASSERT_EQ(cfg.size(), N);
      EXPECT_TRUE(cfg.window.is_torus());
      EXPECT_EQ(cfg.window.length, static_cast<double>(N));
      for (double x : cfg.points) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, static_cast<double>(N));
      }
    }
}

TEST(CircularBeta, EigenanglesMatchDenseCmvMatrix) {
  // CMV matrix C = L M with L = diag(T_0, T_2, ...), M = diag(1, T_1, T_3, ...)
  // and T_k = [[conj a_k, rho_k], [rho_k, -a_k]]; the last coefficient lies on
  // the circle and contributes the 1 x 1 block conj(a_{N-1}).
  using cd = std::complex<double>;
  for (std::size_t N : {3u, 8u, 21u}) {
    Stream rng({15, N}, 0);
    const auto alpha = cbeta_verblunsky(N, 2.0, rng);
    auto block = [&](Eigen::MatrixXcd& A, std::size_t k) {
      const cd a = alpha[k];
      if (k + 1 == N) {
        A(k, k) = std::conj(a);
        return;
      }
      const double rho = std::sqrt(1.0 - std::norm(a));
      A(k, k) = std::conj(a);
      A(k, k + 1) = rho;
      A(k + 1, k) = rho;
      A(k + 1, k + 1) = -a;
    };
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(N, N), M = Eigen::MatrixXcd::Zero(N, N);
    M(0, 0) = 1.0;
    for (std::size_t k = 0; k < N; k += 2) block(L, k);
    for (std::size_t k = 1; k < N; k += 2) block(M, k);
    const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(L * M).eigenvalues();
    std::vector<double> dense;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      EXPECT_NEAR(std::abs(ev(i)), 1.0, 1e-9);
      double a = std::arg(ev(i));
      if (a < 0) a += 2.0 * std::numbers::pi;
      dense.push_back(a);
    }
    std::sort(dense.begin(), dense.end());
    const auto angles = cmv_eigenangles(alpha);
    ASSERT_EQ(angles.size(), N);
    for (std::size_t i = 0; i < N; ++i) EXPECT_NEAR(angles[i], dense[i], 1e-8) << "N=" << N << " i=" << i;
  }
}

TEST(CircularBeta, ArcVarianceMatchesSineKernel) {
  // Exact count variance of the discretized sine DPP on [0, 64):
  // tr K - ||K||_F^2, i.e. sum of lambda (1 - lambda) without diagonalizing.
  const int m = 16, grid = 64 * m;
  double sine_var = 0.0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double d = std::numbers::pi * (i - j) / m;
      const double k = (i == j ? 1.0 : std::sin(d) / d) / m;
      sine_var += (i == j ? k : 0.0) - k * k;
    }
  // Eight disjoint arcs of length 64 per sample of N = 512.
  std::vector<double> arcs;
  for (std::uint64_t r = 0; r < 400; ++r) {
    const auto cfg = sample_circular_beta(512, 2.0, {16, r});
    for (int j = 0; j < 8; ++j) arcs.push_back(static_cast<double>(cfg.count(64.0 * j, 64.0 * (j + 1))));
  }
  EXPECT_NEAR(summarize(arcs).variance, sine_var, 0.15 * sine_var);
}

TEST(CircularBeta, LogCoefficientDecreasesWithBeta) {
  const std::vector<double> ts{4, 8, 16, 32, 64};
  auto log_coef = [&](double beta) {
    std::vector<std::vector<double>> c(ts.size());
    for (std::uint64_t r = 0; r < 300; ++r) {
      const auto cfg = sample_circular_beta(256, beta, {17, r});
      for (std::size_t i = 0; i < ts.size(); ++i)
        for (int j = 0; j * ts[i] < 256; ++j) c[i].push_back(static_cast<double>(cfg.count(j * ts[i], (j + 1) * ts[i])));
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      x.push_back(std::log(ts[i]));
      y.push_back(summarize(c[i]).variance);
    }
    return fit_linear(x, y).slope;
  };
  const double b1 = log_coef(1.0), b2 = log_coef(2.0), b4 = log_coef(4.0);
  EXPECT_GT(b1, b2);
  EXPECT_GT(b2, b4);
}

TEST(SamplerProperties, UnitIntensity) {
  const std::vector<std::pair<const char*, std::size_t>> models{
      {"poisson", 10000},           {"lattice:sigma=0.5", 10000},   {"renewal:law=gamma,shape=4", 10000},
      {"heavytail:alpha=1.5", 10000}, {"renewal:law=uniform", 10000}, {"sine:m=8", 500}};
  for (const auto& [spec, R] : models) {
    const auto s = summarize(counts(parse_model(spec), 128.0, R, 18));
    EXPECT_NEAR(s.mean, 128.0, 4.0 * s.se) << spec;
  }
  EXPECT_EQ(sample(parse_model("cbeta:beta=2"), WindowSpec::torus(128.0), {18, 0}).size(), 128u);
}

TEST(SamplerProperties, StationarityOfHalves) {
  for (const char* spec : {"poisson", "renewal:law=gamma,shape=4", "lattice:sigma=0.5"}) {
    const auto m = parse_model(spec);
    std::vector<double> left, right;
    for (std::uint64_t r = 0; r < 10000; ++r) {
      const auto cfg = sample(m, WindowSpec::interval(64.0), {19, r});
      left.push_back(static_cast<double>(cfg.count(0.0, 32.0)));
      right.push_back(static_cast<double>(cfg.count(32.0, 64.0)));
    }
    EXPECT_GT(two_sample_ks_pvalue(left, right), 0.001) << spec;
  }
}
