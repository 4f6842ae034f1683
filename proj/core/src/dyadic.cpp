#include "otlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "otlab/balanced.hpp"
#include "otlab/error.hpp"
#include "otlab/parallel.hpp"
#include "otlab/samplers.hpp"
#include "otlab/stats.hpp"
#include "otlab/transport.hpp"
#include "sparse_transport.hpp"

namespace otlab {
namespace {

void check_mass(double expected, double got, const char* what) {
  if (std::abs(expected - got) > 1e-9 * std::max(1.0, expected)) {
    std::ostringstream os;
    os.precision(17);
    os << "dyadic construction: " << what << " carries mass " << got << ", expected " << expected;
    throw SolverFailure(os.str());
  }
}

// Unit block [b, b + 1) with z atoms against Lebesgue on [b, b + z).
double unit_block_cost(std::span<const double> atoms, double b, long long cells_per, double p) {
  if (atoms.empty()) return 0.0;
  detail::EngineInput in;
  const double delta = 1.0 / static_cast<double>(cells_per);
  in.grid = {b, delta, atoms.size() * static_cast<std::size_t>(cells_per), false};
  in.atoms.assign(atoms.begin(), atoms.end());
  in.demand = cells_per;
  in.p = p;
  const auto res = detail::solve_engine(in);
  std::vector<std::int64_t> per_cell(in.grid.cells, 0), per_atom(atoms.size(), 0);
  for (const auto& a : res.arcs) {
    per_cell[a.cell] += a.units;
    per_atom[a.atom] += a.units;
  }
  for (auto u : per_cell) check_mass(1.0, static_cast<double>(u), "a level-0 cell");
  for (auto u : per_atom) check_mass(static_cast<double>(cells_per), static_cast<double>(u), "a level-0 atom");
  return res.cost;
}

double repair_cost(double s, long long z, long long z_prime, double half, double delta, double p) {
  if (z + z_prime == 0) return 0.0;
  DiscreteMeasure a, b;
  a.add_lebesgue(s, s + static_cast<double>(z + z_prime), delta);
  b.add_lebesgue(s, s + static_cast<double>(z), delta);
  b.add_lebesgue(s + half, s + half + static_cast<double>(z_prime), delta);
  const auto plan = solve_balanced(a, b, CostSpec{p});
  std::vector<double> out(a.items.size(), 0.0), in(b.items.size(), 0.0);
  for (const auto& e : plan.entries) {
    out[e.from] += e.mass;
    in[e.to] += e.mass;
  }
  for (std::size_t i = 0; i < out.size(); ++i) check_mass(a.items[i].mass, out[i], "a repair supply cell");
  for (std::size_t j = 0; j < in.size(); ++j) check_mass(b.items[j].mass, in[j], "a repair demand cell");
  return plan.cost;
}

}  // namespace

DyadicLedger build_dyadic(std::span<const double> points, int K, double p, double delta) {
  require(K >= 1 && K <= 30, "dyadic depth K must lie in [1, 30]");
  require(p > 0.0 && p < 1.0, "dyadic construction needs 0 < p < 1");
  const long long per = cells_per_unit(delta);
  const long long blocks = 1LL << K;
  for (std::size_t i = 0; i < points.size(); ++i)
    require(points[i] >= 0.0 && points[i] < static_cast<double>(blocks) && (i == 0 || points[i - 1] <= points[i]),
            "dyadic points must be sorted and lie in [0, 2^K)");

  DyadicLedger ledger;
  ledger.K = K;
  ledger.p = p;
  ledger.delta = 1.0 / static_cast<double>(per);

  std::vector<double> cost(blocks);
  std::vector<long long> count(blocks);
  auto it = points.begin();
  for (long long b = 0; b < blocks; ++b) {
    auto end = std::lower_bound(it, points.end(), static_cast<double>(b + 1));
    const std::span<const double> atoms(it, end);
    count[b] = static_cast<long long>(atoms.size());
    cost[b] = unit_block_cost(atoms, static_cast<double>(b), per, p);
    ledger.level0_cost += cost[b];
    it = end;
  }

  for (int k = 0; k <= K; ++k) {
    DyadicLevel level;
    level.k = k;
    level.block_counts = count;
    level.z = count[0];
    double sum = 0.0;
    for (double c : cost) sum += c;
    level.cbar = sum / static_cast<double>(cost.size()) / std::ldexp(1.0, k);
    if (k < K) {
      level.z_prime = count[1];
      const double half = std::ldexp(1.0, k);
      std::vector<double> next_cost(cost.size() / 2);
      std::vector<long long> next_count(count.size() / 2);
      double repairs = 0.0;
      for (std::size_t i = 0; i < next_cost.size(); ++i) {
        const double s = 2.0 * half * static_cast<double>(i);
        const double r = repair_cost(s, count[2 * i], count[2 * i + 1], half, ledger.delta, p);
        repairs += r;
        next_cost[i] = cost[2 * i] + cost[2 * i + 1] + r;
        next_count[i] = count[2 * i] + count[2 * i + 1];
      }
      level.repair_cost = repairs / static_cast<double>(next_cost.size());
      ledger.repair_total += repairs;
      cost = std::move(next_cost);
      count = std::move(next_count);
    }
    ledger.levels.push_back(std::move(level));
  }
  ledger.total_cost = cost[0];
  return ledger;
}

double dyadic_bound_term(int k, double var_z, double p) {
  require(var_z >= 0.0, "variance must be nonnegative");
  return std::ldexp(1.0, -k) * std::pow(var_z, (1.0 + p) / 2.0) +
         0.5 * std::sqrt(var_z) * std::pow(2.0, static_cast<double>(k) * (p - 1.0));
}

DyadicSummary dyadic_experiment(const ProcessModel& model, int K, double p, std::size_t replicas,
                                std::uint64_t seed, double delta, int threads) {
  require(replicas >= 2, "dyadic experiment needs at least 2 replicas");
  if (!supports_interval(model)) throw InvalidArgument("dyadic construction needs a model sampled on an interval");
  std::vector<DyadicLedger> ledgers(replicas);
  const double n = std::ldexp(1.0, K);
  parallel_for(replicas, threads, [&](std::size_t r) {
    const auto cfg = sample(model, WindowSpec::interval(n), {seed, r});
    ledgers[r] = build_dyadic(cfg.points, K, p, delta);
  });

  DyadicSummary out;
  out.model = to_string(model);
  out.seed = seed;
  out.replicas = replicas;
  out.K = K;
  out.p = p;
  out.delta = ledgers.front().delta;
  for (const auto& l : ledgers) {
    const double err = std::abs(l.total_cost - (l.level0_cost + l.repair_total));
    out.telescoping_error = std::max(out.telescoping_error, err);
  }
  std::vector<double> cbar(replicas), inc(replicas);
  for (int k = 0; k <= K; ++k) {
    DyadicRow row;
    row.k = k;
    for (std::size_t r = 0; r < replicas; ++r) cbar[r] = ledgers[r].levels[k].cbar;
    const auto sc = summarize(cbar);
    row.mean_cbar = sc.mean;
    row.se_cbar = sc.se;
    if (k < K) {
      for (std::size_t r = 0; r < replicas; ++r) inc[r] = ledgers[r].levels[k + 1].cbar - ledgers[r].levels[k].cbar;
      const auto si = summarize(inc);
      row.mean_increment = si.mean;
      row.se_increment = si.se;
    } else {
      row.mean_increment = row.se_increment = std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<double> pooled;
    for (const auto& l : ledgers)
      for (long long c : l.levels[k].block_counts) pooled.push_back(static_cast<double>(c));
    row.var_z = pooled.size() >= 2 ? summarize(pooled).variance : 0.0;
    row.bound_term = dyadic_bound_term(k, row.var_z, p);
    out.rows.push_back(row);
  }
  return out;
}

SeriesReport lemma_cvg_series(std::span<const double> f_dyadic, double p) {
  require(!f_dyadic.empty(), "series needs at least one level");
  require(p > 0.0 && p < 1.0, "series needs 0 < p < 1");
  SeriesReport rep;
  double partial = 0.0;
  for (std::size_t k = 0; k < f_dyadic.size(); ++k) {
    if (!(f_dyadic[k] >= 0.0)) throw InvalidArgument("variance values must be nonnegative");
    const double t = dyadic_bound_term(static_cast<int>(k), f_dyadic[k], p);
    rep.terms.push_back(t);
    partial += t;
    rep.partial_sums.push_back(partial);
  }
  std::vector<double> ks, lt;
  for (std::size_t k = f_dyadic.size() / 2; k < f_dyadic.size(); ++k)
    if (rep.terms[k] > 0.0) {
      ks.push_back(static_cast<double>(k));
      lt.push_back(std::log(rep.terms[k]));
    }
  if (ks.size() >= 2) {
    rep.ratio = std::exp(fit_linear(ks, lt).slope);
  } else {
    // Vanishing terms: trivially summable.
    rep.ratio = 0.0;
  }
  rep.summable = rep.ratio < 1.0;
  return rep;
}

ClassifierVerdict theorem_i_classifier(const CostCurve& variance, double p) {
  require(p > 0.0 && p <= 1.0, "classifier needs 0 < p <= 1");
  const auto growth = fit_growth(variance);
  ClassifierVerdict v;
  v.p = p;
  if (growth.preferred == GrowthModel::power) {
    v.exponent = growth.gamma / 2.0 + p - 1.0;
    v.exponent_lo = growth.gamma_lo / 2.0 + p - 1.0;
    v.exponent_hi = growth.gamma_hi / 2.0 + p - 1.0;
  } else {
    v.exponent = v.exponent_lo = v.exponent_hi = p - 1.0;
  }
  for (std::size_t i = 0; i < variance.n.size(); ++i)
    v.values.push_back(std::sqrt(std::max(variance.mean[i], 0.0)) * std::pow(variance.n[i], p - 1.0));
  v.finite_below_p = v.exponent_lo <= 0.0;
  v.confident = v.exponent_hi <= 0.0;
  return v;
}

}  // namespace otlab
