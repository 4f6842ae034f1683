#include "sparse_transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "otlab/error.hpp"
#include "otlab/network_simplex.hpp"
#include "otlab/transport.hpp"

namespace otlab::detail {
namespace {

using Simplex = NetworkSimplex<std::int64_t>;

constexpr int kMaxRounds = 4000;
constexpr std::size_t kColumnsPerRound = 8;
constexpr std::size_t kScanCandidates = 32;

long long floor_index(const CellGrid& grid, double y) {
  return static_cast<long long>(std::floor((y - grid.origin) / grid.delta));
}

}  // namespace

double cell_cost(const CellGrid& grid, long long k, double y, double p) {
  double a = grid.origin + static_cast<double>(k) * grid.delta;
  if (grid.torus) {
    const double circ = static_cast<double>(grid.cells) * grid.delta;
    const double centre = a + 0.5 * grid.delta;
    a -= circ * std::round((centre - y) / circ);
  }
  return segment_cost(a, a + grid.delta, y, p) / grid.delta;
}

EngineResult solve_engine(const EngineInput& in) {
  const CellGrid& grid = in.grid;
  const auto cells = static_cast<long long>(grid.cells);
  const auto atoms = static_cast<long long>(in.atoms.size());
  const std::int64_t demand = in.demand;
  EngineResult out;
  out.prices.assign(in.atoms.size(), 0.0);
  if (atoms == 0) {
    out.padding_certified = true;
    return out;
  }
  if (cells < atoms * demand) {
    std::ostringstream os;
    os << "supply of " << cells << " cells cannot serve " << atoms << " atoms of " << demand << " cells each";
    throw Infeasible(os.str());
  }
  const long long node_count = cells + atoms + 1;
  if (node_count > 2'000'000'000LL) throw InvalidArgument("transport instance too large");
  const int sink = static_cast<int>(cells + atoms);

  // Big-M bound: every simple path uses fewer arcs than nodes.
  double max_cost = 0.0;
  for (double y : in.atoms) {
    if (grid.torus) {
      max_cost = std::max(max_cost, std::pow(0.5 * static_cast<double>(cells) * grid.delta + grid.delta, in.p));
    } else {
      max_cost = std::max({max_cost, cell_cost(grid, 0, y, in.p), cell_cost(grid, cells - 1, y, in.p)});
    }
  }
  Simplex ns(static_cast<int>(node_count), (max_cost + 1.0) * static_cast<double>(node_count + 1));
  for (long long i = 0; i < cells; ++i) ns.set_supply(static_cast<int>(i), 1);
  for (long long j = 0; j < atoms; ++j) ns.set_supply(static_cast<int>(cells + j), -demand);
  ns.set_supply(sink, -(cells - atoms * demand));
  for (long long i = 0; i < cells; ++i) ns.add_arc(static_cast<int>(i), sink, 0.0);

  auto wrap = [&](long long k) { return static_cast<int>(((k % cells) + cells) % cells); };
  // Which (atom, cell) columns are already in the model.
  const std::size_t words = static_cast<std::size_t>((cells + 63) / 64);
  std::vector<std::uint64_t> in_model(words * static_cast<std::size_t>(atoms), 0);
  auto has_arc = [&](long long j, int cell) {
    return (in_model[j * words + cell / 64] >> (cell % 64)) & 1U;
  };
  auto mark_arc = [&](long long j, int cell) { in_model[j * words + cell / 64] |= std::uint64_t{1} << (cell % 64); };
  auto add_range = [&](long long j, long long from, long long to) {
    const double y = in.atoms[j];
    for (long long k = from; k < to; ++k) {
      mark_arc(j, wrap(k));
      ns.add_arc(wrap(k), static_cast<int>(cells + j), cell_cost(grid, k, y, in.p));
    }
  };

  // Initial candidate ranges: about 1.5 units on each side, widened to
  // contain a feasible assignment so that the first solve already carries no
  // artificial flow and its prices are meaningful for pricing.
  std::vector<long long> lo(atoms), hi(atoms);
  const long long radius = demand + (demand + 1) / 2 + 1;
  // Feasible start: every atom in turn takes the free cells nearest to it.
  std::vector<long long> first_cell(atoms), last_cell(atoms);
  {
    std::vector<char> used(cells, 0);
    // Nearest free cell at or left/right of k (path-compressed skip lists).
    std::vector<long long> left_next(cells), right_next(cells);
    for (long long k = 0; k < cells; ++k) left_next[k] = right_next[k] = k;
    auto find = [](std::vector<long long>& next, long long k, long long end) {
      long long root = k;
      while (root != end && next[root] != root) root = next[root];
      while (k != end && next[k] != k) {
        const long long up = next[k];
        next[k] = root;
        k = up;
      }
      return root;
    };
    for (long long j = 0; j < atoms; ++j) {
      const long long home = std::clamp(floor_index(grid, in.atoms[j]), 0LL, cells - 1);
      first_cell[j] = last_cell[j] = home;
      for (std::int64_t t = 0; t < demand; ++t) {
        if (grid.torus) {
          // Small torus instances only: linear scan both ways round the circle.
          long long pick = home;
          for (long long d = 0; d < cells; ++d) {
            if (!used[((home - d) % cells + cells) % cells]) { pick = home - d; break; }
            if (!used[(home + d) % cells]) { pick = home + d; break; }
          }
          used[((pick % cells) + cells) % cells] = 1;
          first_cell[j] = std::min(first_cell[j], pick);
          last_cell[j] = std::max(last_cell[j], pick);
          continue;
        }
        const long long l = find(left_next, home, -1);
        const long long r = find(right_next, home, cells);
        long long pick;
        if (l < 0) pick = r;
        else if (r >= cells) pick = l;
        else pick = (home - l <= r - home) ? l : r;
        used[pick] = 1;
        left_next[pick] = pick - 1;
        right_next[pick] = pick + 1 < cells ? pick + 1 : cells;
        first_cell[j] = std::min(first_cell[j], pick);
        last_cell[j] = std::max(last_cell[j], pick);
      }
    }
  }
  for (long long j = 0; j < atoms; ++j) {
    const long long c = floor_index(grid, in.atoms[j]);
    lo[j] = std::min(c - radius, first_cell[j]);
    hi[j] = std::max(c + radius + 1, last_cell[j] + 1);
    if (grid.torus) {
      if (hi[j] - lo[j] > cells) hi[j] = lo[j] + cells;
    } else {
      lo[j] = std::clamp(lo[j], 0LL, cells);
      hi[j] = std::clamp(hi[j], lo[j], cells);
    }
    add_range(j, lo[j], hi[j]);
  }

  for (int round = 0;; ++round) {
    if (round >= kMaxRounds) throw SolverFailure("column generation did not converge");
    out.rounds = round + 1;
    const auto status = ns.run();
    if (status == Simplex::Status::unbounded || status == Simplex::Status::iteration_limit)
      throw SolverFailure("network simplex failed on the semicoupling instance");

    const double pi_sink = ns.potential(sink);
    bool extended = false;
    std::vector<std::pair<double, long long>> candidates;
    for (long long j = 0; j < atoms; ++j) {
      const double pi_atom = ns.potential(static_cast<int>(cells + j));
      const double bound = pi_atom - pi_sink;
      const double tol = 1e-11 * std::max(1.0, std::abs(pi_atom));
      const double y = in.atoms[j];
      const long long span_limit = grid.torus ? (cells - (hi[j] - lo[j])) : cells;
      candidates.clear();
      auto visit = [&](long long k) {
        const double c = cell_cost(grid, k, y, in.p);
        if (c >= bound - tol) return false;
        const int cell = wrap(k);
        const double rc = c + ns.potential(cell) - pi_atom;
        if (rc < -tol && !has_arc(j, cell)) candidates.push_back({rc, k});
        // Partial pricing: enough entering candidates, stop scanning. A round
        // without any candidate scans the whole region and proves optimality.
        return candidates.size() < kScanCandidates;
      };
      long long taken = 0;
      for (long long k = lo[j] - 1; (grid.torus ? taken < (span_limit + 1) / 2 : k >= 0); --k, ++taken)
        if (!visit(k)) break;
      taken = 0;
      for (long long k = hi[j]; (grid.torus ? taken < span_limit / 2 : k < cells); ++k, ++taken)
        if (!visit(k)) break;
      // Only the most attractive columns enter per round; the rest are
      // repriced after the next solve.
      const auto keep = std::min<std::size_t>(candidates.size(), kColumnsPerRound);
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end());
      for (std::size_t t = 0; t < keep; ++t) {
        const long long k = candidates[t].second;
        mark_arc(j, wrap(k));
        ns.add_arc(wrap(k), static_cast<int>(cells + j), cell_cost(grid, k, y, in.p));
        extended = true;
      }
    }
    if (extended) continue;
    if (!ns.feasible()) throw Infeasible("semicoupling instance has no feasible plan");
    break;
  }

  // Complementary slackness on the final model; columns outside it were
  // priced above.
  const int arc_total = ns.arc_count();
  double cost = 0.0;
  for (int a = 0; a < arc_total; ++a) {
    const double rc = ns.reduced_cost(a);
    const double scale = 1e-9 * std::max({1.0, std::abs(ns.potential(ns.arc_source(a))),
                                          std::abs(ns.potential(ns.arc_target(a)))});
    const std::int64_t f = ns.flow(a);
    if (rc < -scale || (f > 0 && std::abs(rc) > scale) || f < 0)
      throw SolverFailure("semicoupling plan violates complementary slackness");
    if (f > 0 && ns.arc_target(a) != sink) {
      out.arcs.push_back({static_cast<std::size_t>(ns.arc_source(a)),
                          static_cast<std::size_t>(ns.arc_target(a) - cells), f});
      cost += static_cast<double>(f) * ns.arc_cost(a);
    }
  }
  std::sort(out.arcs.begin(), out.arcs.end(), [](const EngineArc& x, const EngineArc& y) {
    return x.cell != y.cell ? x.cell < y.cell : x.atom < y.atom;
  });
  out.cost = cost * grid.delta;
  out.model_arcs = static_cast<std::size_t>(arc_total);
  out.pivots = ns.pivots();

  const double pi_sink = ns.potential(sink);
  bool certified = !grid.torus;
  for (long long j = 0; j < atoms; ++j) {
    const double price = ns.potential(static_cast<int>(cells + j)) - pi_sink;
    out.prices[j] = price;
    if (!grid.torus) {
      const double tol = 1e-11 * std::max(1.0, std::abs(price));
      certified = certified && cell_cost(grid, -1, in.atoms[j], in.p) >= price - tol &&
                  cell_cost(grid, cells, in.atoms[j], in.p) >= price - tol;
    }
  }
  out.padding_certified = certified;
  return out;
}

}  // namespace otlab::detail
