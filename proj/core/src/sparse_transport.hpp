#pragma once

// Column-generation semicoupling between equal-capacity supply cells and
// unit-demand atoms; shared by the line and torus solvers.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace otlab::detail {

struct CellGrid {
  double origin = 0.0;  // left edge of cell 0
  double delta = 0.0;
  std::size_t cells = 0;
  bool torus = false;  // cells wrap around; circumference = cells * delta
};

struct EngineInput {
  CellGrid grid;
  std::vector<double> atoms;  // sorted
  std::int64_t demand = 0;    // cells per atom (1 / delta)
  double p = 1.0;
};

struct EngineArc {
  std::size_t cell;
  std::size_t atom;
  std::int64_t units;
};

struct EngineResult {
  std::vector<EngineArc> arcs;  // positive flows, sorted by (cell, atom)
  double cost = 0.0;            // delta * sum(units * average cell cost)
  std::vector<double> prices;   // pi_atom - pi_sink
  bool padding_certified = false;
  std::size_t model_arcs = 0;
  long long pivots = 0;
  int rounds = 0;
};

/// Average of |x - y|^p over the cell with unwrapped index k (torus cells are
/// measured along the shorter way around).
double cell_cost(const CellGrid& grid, long long k, double y, double p);

/// Exact optimum; free disposal into a sink. Throws Infeasible when the cells
/// cannot cover the demand and SolverFailure when optimality cannot be
/// certified.
EngineResult solve_engine(const EngineInput& input);

}  // namespace otlab::detail
