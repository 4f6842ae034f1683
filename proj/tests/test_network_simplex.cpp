#include <gtest/gtest.h>

#include <random>

#include "otlab/network_simplex.hpp"
#include "support/dense_lp.hpp"

using otlab::NetworkSimplex;

namespace {

struct Instance {
  std::vector<long long> supply, demand;
  std::vector<std::vector<double>> cost;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 6), units(1, 5);
  std::uniform_real_distribution<double> c(0.0, 10.0);
  Instance in;
  in.supply.resize(size(rng));
  in.demand.resize(size(rng));
  long long total = 0;
  for (auto& s : in.supply) total += (s = units(rng));
  // Spread the same total over the demand nodes.
  for (auto& d : in.demand) d = 0;
  for (long long u = 0; u < total; ++u) ++in.demand[rng() % in.demand.size()];
  in.cost.assign(in.supply.size(), std::vector<double>(in.demand.size()));
  for (auto& row : in.cost)
    for (double& x : row) x = c(rng);
  return in;
}

}  // namespace

TEST(NetworkSimplex, TransportationMatchesDenseLp) {
  std::mt19937_64 rng(12345);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng);
    const int S = static_cast<int>(in.supply.size()), D = static_cast<int>(in.demand.size());
    NetworkSimplex<long long> ns(S + D, 1e6);
    for (int i = 0; i < S; ++i) ns.set_supply(i, in.supply[i]);
    for (int j = 0; j < D; ++j) ns.set_supply(S + j, -in.demand[j]);
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < D; ++j) ns.add_arc(i, S + j, in.cost[i][j]);
    ASSERT_EQ(ns.run(), NetworkSimplex<long long>::Status::optimal);
    double cost = 0.0;
    for (int a = 0; a < ns.arc_count(); ++a) {
      EXPECT_GE(ns.flow(a), 0);
      EXPECT_GE(ns.reduced_cost(a), -1e-9);
      if (ns.flow(a) > 0) EXPECT_NEAR(ns.reduced_cost(a), 0.0, 1e-9);
      cost += static_cast<double>(ns.flow(a)) * ns.arc_cost(a);
    }
    std::vector<double> s(in.supply.begin(), in.supply.end()), d(in.demand.begin(), in.demand.end());
    const auto lp = oracle::balanced_lp(s, d, in.cost);
    ASSERT_TRUE(lp.feasible);
    EXPECT_NEAR(cost, lp.value, 1e-9);
  }
}

TEST(NetworkSimplex, ResumesAfterAppendingArcs) {
  // Two sources, two sinks; the cheap arcs arrive only in the second round.
  NetworkSimplex<long long> ns(4, 1e6);
  ns.set_supply(0, 1);
  ns.set_supply(1, 1);
  ns.set_supply(2, -1);
  ns.set_supply(3, -1);
  ns.add_arc(0, 2, 5.0);
  ns.add_arc(1, 3, 5.0);
  ASSERT_EQ(ns.run(), NetworkSimplex<long long>::Status::optimal);
  ns.add_arc(0, 3, 1.0);
  ns.add_arc(1, 2, 1.0);
  ASSERT_EQ(ns.run(), NetworkSimplex<long long>::Status::optimal);
  double cost = 0.0;
  for (int a = 0; a < ns.arc_count(); ++a) cost += static_cast<double>(ns.flow(a)) * ns.arc_cost(a);
  EXPECT_DOUBLE_EQ(cost, 2.0);
}

TEST(NetworkSimplex, ReportsInfeasibility) {
  NetworkSimplex<long long> ns(2, 1e6);
  ns.set_supply(0, 2);
  ns.set_supply(1, -2);
  // No arc from 0 to 1.
  ns.add_arc(1, 0, 1.0);
  EXPECT_EQ(ns.run(), NetworkSimplex<long long>::Status::infeasible);
}
