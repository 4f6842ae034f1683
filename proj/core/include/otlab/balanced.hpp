#pragma once

#include <cstddef>
#include <vector>

#include "otlab/transport.hpp"

namespace otlab {

/// A point mass (width 0) or a uniform density on [center - width/2,
/// center + width/2].
struct MeasureItem {
  double center = 0.0;
  double width = 0.0;
  double mass = 0.0;
};

struct DiscreteMeasure {
  std::vector<MeasureItem> items;

  double total_mass() const;
  void add_atom(double x, double mass = 1.0) { items.push_back({x, 0.0, mass}); }
  /// Lebesgue measure on [a, b) split into cells of width delta (b - a must
  /// be a multiple of delta up to 1e-9), each with mass delta * density.
  void add_lebesgue(double a, double b, double delta, double density = 1.0);
};

/// Transport cost per unit mass between two items: |x - y|^p between atoms,
/// the cell average of |x - y|^p between a cell and an atom, and the
/// translation cost |c - c'|^p between two cells.
double item_cost(const MeasureItem& a, const MeasureItem& b, double p);

struct BalancedPlan {
  struct Entry {
    std::size_t from;
    std::size_t to;
    double mass;
  };
  std::vector<Entry> entries;
  double cost = 0.0;
  /// Which path produced the plan: "identity", "nested" or "simplex".
  const char* method = "simplex";
};

/// Optimal coupling of two measures of equal total mass (within 1e-9).
/// Mass shared by identical items stays in place when all items of both
/// measures are of one kind (atoms or cells of a common width); the cost
/// is then a metric, so this does not change the optimum. If the remaining
/// supply lies entirely on one side of the remaining demand and the cost is
/// a concave function of the centre distance, the order-reversing greedy
/// plan is optimal; otherwise a dense network simplex solves the instance.
BalancedPlan solve_balanced(const DiscreteMeasure& a, const DiscreteMeasure& b, const CostSpec& cost);

}  // namespace otlab
