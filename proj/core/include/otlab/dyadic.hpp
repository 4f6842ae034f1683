#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "otlab/estimators.hpp"
#include "otlab/process_model.hpp"

namespace otlab {

/// One level k of the recursive construction on a single path.
struct DyadicLevel {
  int k = 0;
  /// Count in [0, 2^k) and in [2^k, 2^{k+1}); z_prime is -1 at the top level.
  long long z = 0;
  long long z_prime = -1;
  /// Constructed coupling cost per unit length, averaged over the 2^{K-k}
  /// blocks of length 2^k.
  double cbar = 0.0;
  /// Mean repair cost of the merges k -> k + 1 (0 at the top level).
  double repair_cost = 0.0;
  /// Point counts of all blocks of length 2^k, left to right.
  std::vector<long long> block_counts;
};

struct DyadicLedger {
  int K = 0;
  double p = 0.0;
  double delta = 0.0;
  std::vector<DyadicLevel> levels;
  /// Cost of the top-level coupling, the sum of the level-0 block costs and
  /// the sum of all repair costs; the first equals the other two combined.
  double total_cost = 0.0;
  double level0_cost = 0.0;
  double repair_total = 0.0;
};

/// Builds the coupling between 1_{[0, Z_K)} Lebesgue and the points on
/// [0, 2^K). Unit blocks are coupled with the left-aligned Lebesgue block of
/// matching mass; sibling blocks are merged by keeping both child couplings
/// and adding the optimal repair from 1_{[0, Z_{k+1})} to
/// 1_{[0, Z_k)} + 1_{[2^k, 2^k + Z'_k)} (stacked cells where the two
/// overlap). Points must be sorted and lie in [0, 2^K).
DyadicLedger build_dyadic(std::span<const double> points, int K, double p, double delta);

/// Monte Carlo summary per level.
struct DyadicRow {
  int k = 0;
  double mean_cbar = 0.0, se_cbar = 0.0;
  /// E[cbar_{k+1} - cbar_k]; NaN at the top level.
  double mean_increment = 0.0, se_increment = 0.0;
  /// Pooled Monte Carlo variance of the counts of blocks of length 2^k.
  double var_z = 0.0;
  /// 2^{-k} Var(Z_k)^{(1+p)/2} + Var(Z_k)^{1/2} 2^{k(p-1)} / 2
  double bound_term = 0.0;
};

struct DyadicSummary {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  int K = 0;
  double p = 0.0;
  double delta = 0.0;
  std::vector<DyadicRow> rows;
  /// Largest |total - (level 0 + repairs)| over all paths.
  double telescoping_error = 0.0;
};

double dyadic_bound_term(int k, double var_z, double p);

DyadicSummary dyadic_experiment(const ProcessModel& model, int K, double p, std::size_t replicas,
                                std::uint64_t seed, double delta, int threads = 0);

struct SeriesReport {
  std::vector<double> terms;
  std::vector<double> partial_sums;
  /// exp of the slope of log(term) against k over the upper half of the
  /// observed levels.
  double ratio = 0.0;
  bool summable = false;
};

/// Terms 2^{-k} f_k^{(1+p)/2} + f_k^{1/2} 2^{k(p-1)} / 2 for f_k = f(2^k),
/// k = 0, 1, ...; "summable" when the ratio estimate is below 1.
SeriesReport lemma_cvg_series(std::span<const double> f_dyadic, double p);

struct ClassifierVerdict {
  double p = 0.0;
  /// Growth exponent of sqrt(f(n)) n^{p-1} from the fitted law, with its
  /// 95% interval.
  double exponent = 0.0;
  double exponent_lo = 0.0, exponent_hi = 0.0;
  /// sqrt(f(n)) n^{p-1} along the grid.
  std::vector<double> values;
  /// sqrt(f(n)) n^{p-1} stays bounded (exponent not significantly above
  /// 0), so the cost is finite for every q < p.
  bool finite_below_p = false;
  /// The whole interval lies at or below 0.
  bool confident = false;
};

ClassifierVerdict theorem_i_classifier(const CostCurve& variance, double p);

}  // namespace otlab
