#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otlab/point_configuration.hpp"

namespace otlab {

/// Cost |x - y|^p with 0 < p <= 1.
struct CostSpec {
  double p = 0.5;
  void validate() const;
};

/// Integral of |x - y|^p over [a, b].
double segment_cost(double a, double b, double y, double p);

/// Cells of width delta covering [-L', n + L'], where L' is the padding
/// rounded up to a multiple of delta. 1/delta must be an integer.
struct SupplyGrid {
  double origin = 0.0;
  double delta = 0.0;
  std::size_t cells = 0;

  double left(std::size_t i) const { return origin + static_cast<double>(i) * delta; }
  double center(std::size_t i) const { return left(i) + 0.5 * delta; }
};

SupplyGrid make_supply_grid(double n, double padding, double delta);

/// Number of cells per unit mass; throws unless 1/delta is an integer.
long long cells_per_unit(double delta);

struct Assignment {
  std::size_t cell;
  std::size_t atom;
  double mass;
};

/// Optimal semicoupling between the discretized Lebesgue supply on
/// [-L, n + L] and unit atoms in [0, n).
struct SemicouplingPlan {
  CostSpec cost;
  double window_length = 0.0;
  double padding = 0.0;
  SupplyGrid grid;
  std::vector<double> atoms;
  /// Sorted by (cell, atom).
  std::vector<Assignment> assignments;
  double total_cost = 0.0;
  /// Left edge of the leftmost and right edge of the rightmost used cell.
  double l = 0.0, r = 0.0;
  /// Dual price of each atom relative to disposal.
  std::vector<double> atom_prices;
  /// True when the dual solution proves that no larger padding lowers the cost.
  bool padding_certified = false;
  int doublings = 0;

  /// Mass-weighted mean target of the cell containing x; NaN for unused cells.
  double target_at(double x) const;
  std::vector<double> map_samples(std::span<const double> queries) const;
  /// Mass received by every atom.
  std::vector<double> atom_mass() const;
};

SemicouplingPlan solve_semicoupling(const PointConfiguration& points, const CostSpec& cost, double delta,
                                    double padding);
SemicouplingPlan solve_semicoupling(std::span<const double> atoms, double n, const CostSpec& cost, double delta,
                                    double padding);

/// Default initial padding 4 sqrt(n) + 8.
double default_padding(double n);

/// Solves with L = L0, 2 L0, 4 L0, ... and stops once the relative cost
/// decrease drops below 1e-6 or the dual certificate shows that more padding
/// cannot help. More than 12 doublings is an error.
SemicouplingPlan adaptive_padding(const PointConfiguration& points, const CostSpec& cost, double delta, double L0);
SemicouplingPlan adaptive_padding(std::span<const double> atoms, double n, const CostSpec& cost, double delta,
                                  double L0);

struct BoundaryDiagnostics {
  double l = 0.0, r = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  std::size_t count = 0;
  double variance = 0.0;
  /// count >= n + 4 sqrt(variance)
  bool conditioned_event = false;
  /// |l| >= 2 sqrt(variance) or |r - n| >= 2 sqrt(variance)
  bool overhang_property = false;
  /// (a + c) / n
  double kappa = 0.0;
};

/// `variance` is an external estimate of Var(count in [0, n)).
BoundaryDiagnostics boundary_diagnostics(const SemicouplingPlan& plan, double variance);

struct MonotonicityReport {
  std::size_t left_cells = 0, right_cells = 0;
  std::size_t checked_pairs = 0;
  std::size_t violations = 0;
  /// Unused cells strictly inside an overhang.
  std::size_t overhang_gaps = 0;
  /// Largest number of maximal cell runs served to one atom.
  std::size_t max_runs_per_atom = 0;
  bool ok() const { return violations == 0; }
};

/// Checks that the map reverses cell order on each overhang, with a tolerance
/// of one cell width. Refuses p = 1.
MonotonicityReport edge_monotonicity_check(const SemicouplingPlan& plan);

}  // namespace otlab
