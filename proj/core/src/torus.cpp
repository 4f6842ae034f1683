#include "otlab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "otlab/error.hpp"
#include "otlab/parallel.hpp"
#include "otlab/samplers.hpp"
#include "otlab/stats.hpp"
#include "otlab/transport.hpp"
#include "sparse_transport.hpp"

namespace otlab {
namespace {

// Antiderivative of min(|u|, t).
double capped_primitive(double u, double t) {
  const double a = std::abs(u);
  const double v = a <= t ? 0.5 * a * a : t * a - 0.5 * t * t;
  return u < 0.0 ? -v : v;
}

// Integral over x in [a, b] of min(|y - x|, t).
double capped_integral(double a, double b, double y, double t) {
  return capped_primitive(b - y, t) - capped_primitive(a - y, t);
}

// y shifted by a multiple of N to lie nearest to x.
double lift_near(double y, double x, double N) { return y + N * std::round((x - y) / N); }

double wrap_signed(double d, double N) {
  d -= N * std::floor(d / N);
  return d > N / 2.0 ? d - N : d;
}

void check_config(const PointConfiguration& config) {
  require(config.window.is_torus(), "torus allocation needs a torus configuration");
  require(!config.points.empty(), "torus allocation needs at least one point");
  const double N = config.window.length;
  require(std::abs(N - static_cast<double>(config.points.size())) < 1e-9,
          "torus allocation needs exactly N points on circumference N");
}

double median_shift(std::span<const double> x, double N) {
  // Pieces of D(x) = x - #{x_j < x}: on (x_{j-1}, x_j] it runs from
  // x_{j-1} - j with slope 1.
  struct Piece {
    double low, length;
  };
  std::vector<Piece> pieces;
  const std::size_t n = x.size();
  for (std::size_t j = 0; j <= n; ++j) {
    const double start = j == 0 ? 0.0 : x[j - 1];
    const double end = j == n ? N : x[j];
    pieces.push_back({start - static_cast<double>(j), end - start});
  }
  double lo = pieces.front().low, hi = lo;
  for (const auto& p : pieces) {
    lo = std::min(lo, p.low);
    hi = std::max(hi, p.low + p.length);
  }
  auto below = [&](double theta) {
    double m = 0.0;
    for (const auto& p : pieces) m += std::clamp(theta - p.low, 0.0, p.length);
    return m;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) < N / 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double TorusAllocation::displacement(double x) const {
  const double N = circumference;
  if (method == "circle_cdf") {
    const auto i = static_cast<long long>(std::floor(x - theta));
    const auto n = static_cast<long long>(points.size());
    const long long j = ((i % n) + n) % n;
    return wrap_signed(points[j] - x, N);
  }
  const double pos = x - N * std::floor(x / N);
  const auto k = std::min(static_cast<std::size_t>(pos / delta), cell_atom.size() - 1);
  return wrap_signed(points[cell_atom[k]] - x, N);
}

double TorusAllocation::mean_capped_displacement(double t) const {
  const double N = circumference;
  double acc = 0.0;
  if (method == "circle_cdf") {
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double a = static_cast<double>(j) + theta;
      acc += capped_integral(a, a + 1.0, lift_near(points[j], a + 0.5, N), t);
    }
  } else {
    for (std::size_t k = 0; k < cell_atom.size(); ++k) {
      const double a = static_cast<double>(k) * delta;
      acc += capped_integral(a, a + delta, lift_near(points[cell_atom[k]], a + 0.5 * delta, N), t);
    }
  }
  return acc / N;
}

double TorusAllocation::mean_displacement() const {
  const double N = circumference;
  double acc = 0.0;
  if (method == "circle_cdf") {
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double c = static_cast<double>(j) + theta + 0.5;
      acc += lift_near(points[j], c, N) - c;
    }
  } else {
    for (std::size_t k = 0; k < cell_atom.size(); ++k) {
      const double c = (static_cast<double>(k) + 0.5) * delta;
      acc += delta * (lift_near(points[cell_atom[k]], c, N) - c);
    }
  }
  return acc / N;
}

TorusAllocation solve_torus_flow(const PointConfiguration& config, double p, double delta) {
  check_config(config);
  CostSpec{p}.validate();
  const long long per = cells_per_unit(delta);
  TorusAllocation out;
  out.circumference = config.window.length;
  out.p = p;
  out.points = config.points;
  out.method = "flow";
  out.delta = 1.0 / static_cast<double>(per);
  detail::EngineInput in;
  in.grid = {0.0, out.delta, config.points.size() * static_cast<std::size_t>(per), true};
  in.atoms = config.points;
  in.demand = per;
  in.p = p;
  const auto res = detail::solve_engine(in);
  out.cell_atom.assign(in.grid.cells, config.points.size());
  for (const auto& a : res.arcs) {
    if (a.units != 1 || out.cell_atom[a.cell] != config.points.size())
      throw SolverFailure("torus flow split a cell between atoms");
    out.cell_atom[a.cell] = a.atom;
  }
  for (auto a : out.cell_atom)
    if (a == config.points.size()) throw SolverFailure("torus flow left a cell unassigned");
  out.cost = res.cost;
  return out;
}

TorusAllocation solve_torus_allocation(const PointConfiguration& config, double p, double delta) {
  check_config(config);
  CostSpec{p}.validate();
  if (p < 1.0) return solve_torus_flow(config, p, delta);
  TorusAllocation out;
  out.circumference = config.window.length;
  out.p = 1.0;
  out.points = config.points;
  out.method = "circle_cdf";
  out.theta = median_shift(config.points, out.circumference);
  for (std::size_t j = 0; j < out.points.size(); ++j) {
    const double a = static_cast<double>(j) + out.theta;
    out.cost += segment_cost(a, a + 1.0, lift_near(out.points[j], a + 0.5, out.circumference), 1.0);
  }
  return out;
}

double cyclic_monotone_cost(std::span<const double> points, double circumference, double p, double delta) {
  require(!points.empty() && std::abs(circumference - static_cast<double>(points.size())) < 1e-9,
          "cyclic assignment needs N points on circumference N");
  const long long per = cells_per_unit(delta);
  const long long cells = static_cast<long long>(points.size()) * per;
  const detail::CellGrid grid{0.0, 1.0 / static_cast<double>(per), static_cast<std::size_t>(cells), true};
  double best = std::numeric_limits<double>::infinity();
  for (long long s = 0; s < cells; ++s) {
    double c = 0.0;
    for (long long i = 0; i < cells; ++i) c += detail::cell_cost(grid, (s + i) % cells, points[i / per], p);
    best = std::min(best, c * grid.delta);
  }
  return best;
}

PointConfiguration sample_torus_surrogate(const ProcessModel& model, std::size_t N, SeedPair seed) {
  require(N >= 2, "torus surrogate needs N >= 2");
  const auto window = WindowSpec::torus(static_cast<double>(N));
  if (std::holds_alternative<Poisson>(model)) return sample_uniform_points(window, N, seed);
  if (const auto* c = std::get_if<CircularBeta>(&model)) return sample_circular_beta(N, c->beta, seed);
  if (const auto* l = std::get_if<PerturbedLattice>(&model)) return sample_perturbed_lattice(window, l->sigma, seed);
  throw InvalidArgument("shift coupling supports poisson, lattice and cbeta models, not " + to_string(model));
}

ShiftCouplingReport shift_coupling_check(const ProcessModel& model, std::size_t N, std::span<const double> t_grid,
                                         std::size_t replicas, std::uint64_t seed, double p, double delta,
                                         int threads) {
  require(replicas >= 2, "shift coupling check needs at least 2 replicas");
  require(!t_grid.empty(), "t grid is empty");
  for (double t : t_grid) require(t > 0.0 && t <= static_cast<double>(N) / 2.0, "t grid must lie in (0, N/2]");
  const std::size_t g = t_grid.size();
  std::vector<double> lhs(replicas * g), rhs(replicas * g), mean_x(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    const auto cfg = sample_torus_surrogate(model, N, {seed, r});
    const auto alloc = solve_torus_allocation(cfg, p, delta);
    mean_x[r] = alloc.mean_displacement();
    const double Nd = static_cast<double>(N);
    for (std::size_t i = 0; i < g; ++i) {
      const double t = t_grid[i];
      // count([s, s + t)) changes only where s or s + t crosses a point.
      std::vector<double> cuts{0.0, Nd};
      for (double x : cfg.points) {
        cuts.push_back(x);
        double y = x - t;
        y -= Nd * std::floor(y / Nd);
        cuts.push_back(y);
      }
      std::sort(cuts.begin(), cuts.end());
      double acc = 0.0;
      for (std::size_t c = 1; c < cuts.size(); ++c) {
        const double len = cuts[c] - cuts[c - 1];
        if (len <= 0.0) continue;
        const double mid = 0.5 * (cuts[c] + cuts[c - 1]);
        acc += len * std::abs(1.0 - static_cast<double>(cfg.count(mid, mid + t)) / t);
      }
      lhs[r * g + i] = acc / Nd;
      rhs[r * g + i] = 2.0 / t * alloc.mean_capped_displacement(t);
    }
  });

  ShiftCouplingReport rep;
  rep.model = to_string(model);
  rep.N = N;
  rep.replicas = replicas;
  rep.seed = seed;
  rep.p = p;
  rep.holds = true;
  std::vector<double> a(replicas), b(replicas), d(replicas);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t r = 0; r < replicas; ++r) {
      a[r] = lhs[r * g + i];
      b[r] = rhs[r * g + i];
      d[r] = b[r] - a[r];
    }
    ShiftRow row;
    row.t = t_grid[i];
    const auto sa = summarize(a), sb = summarize(b);
    row.lhs_mean = sa.mean;
    row.lhs_se = sa.se;
    row.rhs_mean = sb.mean;
    row.rhs_se = sb.se;
    row.margin = row.rhs_mean - row.lhs_mean;
    row.margin_se = summarize(d).se;
    rep.holds = rep.holds && row.margin >= -2.0 * row.margin_se;
    rep.rows.push_back(row);
  }
  const auto sx = summarize(mean_x);
  rep.mean_displacement = sx.mean;
  rep.mean_displacement_se = sx.se;
  return rep;
}

WitnessReport theorem_p1_witness(const ProcessModel& model, std::span<const double> t_grid, std::size_t replicas,
                                 std::uint64_t seed, int threads) {
  require(t_grid.size() >= 3, "witness needs at least three grid points");
  EstimatorOptions opt;
  opt.threads = threads;
  WitnessReport rep;
  rep.absdev = central_moment_curve(model, t_grid, replicas, seed, opt);
  const std::size_t g = t_grid.size();
  std::vector<double> lt(g), w(g);
  bool weighted = true;
  for (std::size_t i = 0; i < g; ++i) {
    rep.lower_bound.push_back(0.5 * rep.absdev.mean[i]);
    rep.lower_bound_se.push_back(0.5 * rep.absdev.se[i]);
    lt[i] = std::log(t_grid[i]);
    weighted = weighted && rep.lower_bound_se[i] > 0.0;
  }
  for (std::size_t i = 0; i < g; ++i) w[i] = weighted ? 1.0 / (rep.lower_bound_se[i] * rep.lower_bound_se[i]) : 1.0;
  const auto fit = fit_linear(lt, rep.lower_bound, w);
  rep.slope = fit.slope;
  std::tie(rep.slope_lo, rep.slope_hi) = fit.slope_ci();
  rep.divergent = rep.slope_lo > 0.0 && rep.lower_bound.back() > rep.lower_bound.front();
  return rep;
}

}  // namespace otlab
