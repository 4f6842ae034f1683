#include "otlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "otlab/error.hpp"
#include "sparse_transport.hpp"

namespace otlab {
namespace {

// Integral of u^p over [u, u + w] for u >= 0, without cancellation when w << u.
double one_sided(double u, double w, double p) {
  const double q = p + 1.0;
  if (w <= 0.0) return 0.0;
  if (u <= 0.0) return std::pow(w, q) / q;
  return std::pow(u, q) * std::expm1(q * std::log1p(w / u)) / q;
}

void check_atoms(std::span<const double> atoms, double n) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(std::isfinite(atoms[i]) && atoms[i] >= 0.0 && atoms[i] < n, "atoms must lie in [0, n)");
    require(i == 0 || atoms[i - 1] <= atoms[i], "atoms must be sorted");
  }
}

}  // namespace

void CostSpec::validate() const {
  if (!(std::isfinite(p) && p > 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "cost exponent p = " << p << " is outside the supported range (0, 1]";
    throw InvalidArgument(os.str());
  }
}

double segment_cost(double a, double b, double y, double p) {
  require(a <= b, "segment_cost needs a <= b");
  if (y <= a) return one_sided(a - y, b - a, p);
  if (y >= b) return one_sided(y - b, b - a, p);
  const double q = p + 1.0;
  return (std::pow(y - a, q) + std::pow(b - y, q)) / q;
}

long long cells_per_unit(double delta) {
  require(std::isfinite(delta) && delta > 0.0 && delta <= 1.0, "cell width must lie in (0, 1]");
  const double inv = 1.0 / delta;
  const double d = std::round(inv);
  require(std::abs(inv - d) < 1e-9 * d, "1/delta must be an integer");
  return static_cast<long long>(d);
}

SupplyGrid make_supply_grid(double n, double padding, double delta) {
  require(std::isfinite(n) && n >= 0.0, "window length must be nonnegative");
  require(std::isfinite(padding) && padding >= 0.0, "padding must be nonnegative");
  const auto per_unit = static_cast<double>(cells_per_unit(delta));
  const double pad_cells = std::ceil(padding * per_unit - 1e-9);
  SupplyGrid grid;
  grid.delta = 1.0 / per_unit;
  grid.origin = -pad_cells / per_unit;
  grid.cells = static_cast<std::size_t>(std::ceil(n * per_unit - 1e-9) + 2.0 * pad_cells);
  return grid;
}

double default_padding(double n) { return 4.0 * std::sqrt(n) + 8.0; }

SemicouplingPlan solve_semicoupling(std::span<const double> atoms, double n, const CostSpec& cost, double delta,
                                    double padding) {
  cost.validate();
  check_atoms(atoms, n);
  SemicouplingPlan plan;
  plan.cost = cost;
  plan.window_length = n;
  plan.grid = make_supply_grid(n, padding, delta);
  plan.padding = -plan.grid.origin;
  plan.atoms.assign(atoms.begin(), atoms.end());

  detail::EngineInput in;
  in.grid = {plan.grid.origin, plan.grid.delta, plan.grid.cells, false};
  in.atoms = plan.atoms;
  in.demand = cells_per_unit(delta);
  in.p = cost.p;
  const auto result = detail::solve_engine(in);

  plan.assignments.reserve(result.arcs.size());
  for (const auto& arc : result.arcs)
    plan.assignments.push_back({arc.cell, arc.atom, static_cast<double>(arc.units) * plan.grid.delta});
  plan.total_cost = result.cost;
  plan.atom_prices = result.prices;
  plan.padding_certified = result.padding_certified;
  if (!plan.assignments.empty()) {
    plan.l = plan.grid.left(plan.assignments.front().cell);
    plan.r = plan.grid.left(plan.assignments.back().cell) + plan.grid.delta;
  }
  return plan;
}

SemicouplingPlan solve_semicoupling(const PointConfiguration& points, const CostSpec& cost, double delta,
                                    double padding) {
  require(!points.window.is_torus(), "semicouplings are defined on interval windows");
  return solve_semicoupling(points.points, points.window.length, cost, delta, padding);
}

SemicouplingPlan adaptive_padding(std::span<const double> atoms, double n, const CostSpec& cost, double delta,
                                  double L0) {
  require(std::isfinite(L0) && L0 > 0.0, "initial padding must be positive");
  constexpr int kMaxDoublings = 12;
  double padding = L0;
  double previous = std::numeric_limits<double>::infinity();
  for (int d = 0; d <= kMaxDoublings; ++d, padding *= 2.0) {
    auto plan = solve_semicoupling(atoms, n, cost, delta, padding);
    plan.doublings = d;
    if (plan.padding_certified) return plan;
    if (d > 0 && previous - plan.total_cost <= 1e-6 * previous) return plan;
    previous = plan.total_cost;
  }
  throw SolverFailure("adaptive padding did not converge within 12 doublings");
}

SemicouplingPlan adaptive_padding(const PointConfiguration& points, const CostSpec& cost, double delta, double L0) {
  require(!points.window.is_torus(), "semicouplings are defined on interval windows");
  return adaptive_padding(points.points, points.window.length, cost, delta, L0);
}

double SemicouplingPlan::target_at(double x) const {
  const double pos = std::floor((x - grid.origin) / grid.delta);
  if (pos < 0.0 || pos >= static_cast<double>(grid.cells)) return std::numeric_limits<double>::quiet_NaN();
  const auto cell = static_cast<std::size_t>(pos);
  auto it = std::lower_bound(assignments.begin(), assignments.end(), cell,
                             [](const Assignment& a, std::size_t c) { return a.cell < c; });
  double mass = 0.0, moment = 0.0;
  for (; it != assignments.end() && it->cell == cell; ++it) {
    mass += it->mass;
    moment += it->mass * atoms[it->atom];
  }
  return mass > 0.0 ? moment / mass : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> SemicouplingPlan::map_samples(std::span<const double> queries) const {
  std::vector<double> out;
  out.reserve(queries.size());
  for (double x : queries) out.push_back(target_at(x));
  return out;
}

std::vector<double> SemicouplingPlan::atom_mass() const {
  std::vector<double> mass(atoms.size(), 0.0);
  for (const auto& a : assignments) mass[a.atom] += a.mass;
  return mass;
}

BoundaryDiagnostics boundary_diagnostics(const SemicouplingPlan& plan, double variance) {
  require(std::isfinite(variance) && variance >= 0.0, "variance estimate must be nonnegative");
  const double n = plan.window_length;
  BoundaryDiagnostics d;
  d.l = plan.l;
  d.r = plan.r;
  d.count = plan.atoms.size();
  d.variance = variance;

  // Falls back to the nearest used cell towards the window if the query cell
  // happens to be unused.
  auto map_towards = [&](double x, double step) {
    for (int i = 0; i < 4; ++i, x += step) {
      const double t = plan.target_at(x);
      if (!std::isnan(t)) return t;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  d.a = 0.0;
  if (plan.l < 0.0) {
    const double t = map_towards(plan.l / 2.0, plan.grid.delta);
    d.a = std::isnan(t) ? 0.0 : std::clamp(t, 0.0, n);
  }
  d.b = n;
  if (plan.r > n) {
    const double t = map_towards(n + (plan.r - n) / 2.0, -plan.grid.delta);
    d.b = std::isnan(t) ? n : std::clamp(t, 0.0, n);
  }
  d.c = n - d.b;
  const double sd = std::sqrt(variance);
  d.conditioned_event = static_cast<double>(d.count) >= n + 4.0 * sd;
  d.overhang_property = std::abs(d.l) >= 2.0 * sd || std::abs(d.r - n) >= 2.0 * sd;
  d.kappa = n > 0.0 ? (d.a + d.c) / n : 0.0;
  return d;
}

MonotonicityReport edge_monotonicity_check(const SemicouplingPlan& plan) {
  if (!(plan.cost.p < 1.0))
    throw InvalidArgument("edge monotonicity needs a strictly concave cost (p < 1); optima are not unique at p = 1");
  const auto& g = plan.grid;
  const double n = plan.window_length;
  const double eps = 1e-9 * g.delta;

  // Mass-weighted mean target per used cell.
  std::vector<std::pair<std::size_t, double>> used;
  for (std::size_t i = 0; i < plan.assignments.size();) {
    const std::size_t cell = plan.assignments[i].cell;
    double mass = 0.0, moment = 0.0;
    for (; i < plan.assignments.size() && plan.assignments[i].cell == cell; ++i) {
      mass += plan.assignments[i].mass;
      moment += plan.assignments[i].mass * plan.atoms[plan.assignments[i].atom];
    }
    used.emplace_back(cell, moment / mass);
  }

  MonotonicityReport report;
  auto scan = [&](auto in_side, std::size_t& side_cells) {
    const std::pair<std::size_t, double>* prev = nullptr;
    for (const auto& u : used) {
      if (!in_side(u.first)) continue;
      ++side_cells;
      if (prev) {
        ++report.checked_pairs;
        if (prev->second < u.second - g.delta) ++report.violations;
        report.overhang_gaps += u.first - prev->first - 1;
      }
      prev = &u;
    }
  };
  scan([&](std::size_t c) { return g.left(c) + g.delta <= eps; }, report.left_cells);
  scan([&](std::size_t c) { return g.left(c) >= n - eps; }, report.right_cells);

  // Maximal runs of consecutive cells per atom.
  std::vector<long long> last_cell(plan.atoms.size(), -2);
  std::vector<std::size_t> runs(plan.atoms.size(), 0);
  for (const auto& a : plan.assignments) {
    if (static_cast<long long>(a.cell) != last_cell[a.atom] + 1) ++runs[a.atom];
    last_cell[a.atom] = static_cast<long long>(a.cell);
  }
  for (std::size_t r : runs) report.max_runs_per_atom = std::max(report.max_runs_per_atom, r);
  return report;
}

}  // namespace otlab
