#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "otlab/estimators.hpp"
#include "otlab/point_configuration.hpp"
#include "otlab/process_model.hpp"

namespace otlab {

/// Balanced transport from Lebesgue measure on a torus of circumference N to
/// N unit atoms.
struct TorusAllocation {
  double circumference = 0.0;
  double p = 1.0;
  std::vector<double> points;
  /// Total cost, integral of |X(x)|^p over the torus.
  double cost = 0.0;
  /// "circle_cdf" (p = 1) or "flow".
  std::string method;
  /// circle_cdf: Lebesgue point x goes to atom floor(x - theta) (cyclic).
  double theta = 0.0;
  /// flow: cell width and the atom receiving each cell.
  double delta = 0.0;
  std::vector<std::size_t> cell_atom;

  /// Signed shortest displacement T(x) - x in (-N/2, N/2].
  double displacement(double x) const;
  /// (1/N) * integral of min(|X(x)|, t) over the torus, exact.
  double mean_capped_displacement(double t) const;
  /// (1/N) * integral of X(x) over the torus, exact.
  double mean_displacement() const;
};

/// p = 1: circle-CDF method (theta is a median of x - #{points < x} under
/// Lebesgue). p < 1: the discretized flow solver with wrap-around costs.
TorusAllocation solve_torus_allocation(const PointConfiguration& config, double p, double delta = 1.0 / 64.0);

/// Flow solver at any p in (0, 1] (used to cross-check the circle method).
TorusAllocation solve_torus_flow(const PointConfiguration& config, double p, double delta);

/// Best cyclically monotone assignment of whole cells (cell s + i goes to
/// atom floor(i / D)) over all shifts s. For p = 1 this is the exact optimum
/// of the discretized problem solved by solve_torus_flow.
double cyclic_monotone_cost(std::span<const double> points, double circumference, double p, double delta);

struct ShiftRow {
  double t = 0.0;
  double lhs_mean = 0.0, lhs_se = 0.0;
  double rhs_mean = 0.0, rhs_se = 0.0;
  /// rhs_mean - lhs_mean, and the standard error of the paired difference.
  double margin = 0.0, margin_se = 0.0;
};

struct ShiftCouplingReport {
  std::string model;
  std::size_t N = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  double p = 1.0;
  std::vector<ShiftRow> rows;
  /// E[X(U)] and its standard error.
  double mean_displacement = 0.0, mean_displacement_se = 0.0;
  /// Every margin >= -2 margin_se.
  bool holds = false;
};

/// Samples N points on the torus of circumference N: Poisson means N uniform
/// points, the circular beta ensemble its rescaled eigenangles, the
/// perturbed lattice N wrapped sites. Left side: average over s of
/// |1 - count([s, s + t)) / t|; right side: (2 / t) E[min(|X(U)|, t)].
/// Both are exact averages over the torus for each sample.
ShiftCouplingReport shift_coupling_check(const ProcessModel& model, std::size_t N, std::span<const double> t_grid,
                                         std::size_t replicas, std::uint64_t seed, double p = 1.0,
                                         double delta = 1.0 / 64.0, int threads = 0);

/// Torus sample used by shift_coupling_check.
PointConfiguration sample_torus_surrogate(const ProcessModel& model, std::size_t N, SeedPair seed);

struct WitnessReport {
  CostCurve absdev;
  /// E|X| >= lower_bound(t) = E|t - count([0, t))| / 2 along the grid.
  std::vector<double> lower_bound, lower_bound_se;
  /// Weighted slope of the lower bound against log t with its 95% interval.
  double slope = 0.0, slope_lo = 0.0, slope_hi = 0.0;
  bool divergent = false;
};

/// Divergent when the lower bound increases along the grid and its slope
/// against log t is significantly positive.
WitnessReport theorem_p1_witness(const ProcessModel& model, std::span<const double> t_grid, std::size_t replicas,
                                 std::uint64_t seed, int threads = 0);

}  // namespace otlab
