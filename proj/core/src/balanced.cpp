#include "otlab/balanced.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "otlab/error.hpp"
#include "otlab/network_simplex.hpp"

namespace otlab {
namespace {

struct Residual {
  std::size_t index;
  double center;
  double mass;
};

bool single_kind(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const MeasureItem* ref = !a.items.empty() ? &a.items.front() : (!b.items.empty() ? &b.items.front() : nullptr);
  if (!ref) return true;
  auto same = [&](const MeasureItem& it) { return it.width == ref->width; };
  return std::all_of(a.items.begin(), a.items.end(), same) && std::all_of(b.items.begin(), b.items.end(), same);
}

std::vector<std::size_t> order_by_key(const DiscreteMeasure& m) {
  std::vector<std::size_t> idx(m.items.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = m.items[x];
    const auto& b = m.items[y];
    return a.center != b.center ? a.center < b.center : a.width < b.width;
  });
  return idx;
}

}  // namespace

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& it : items) s += it.mass;
  return s;
}

void DiscreteMeasure::add_lebesgue(double a, double b, double delta, double density) {
  require(b >= a && delta > 0.0, "Lebesgue block needs a <= b and delta > 0");
  const double count = std::round((b - a) / delta);
  require(std::abs((b - a) / delta - count) < 1e-9 * std::max(1.0, count), "block length must be a multiple of delta");
  const auto cells = static_cast<std::size_t>(count);
  items.reserve(items.size() + cells);
  for (std::size_t i = 0; i < cells; ++i)
    items.push_back({a + (static_cast<double>(i) + 0.5) * delta, delta, delta * density});
}

double item_cost(const MeasureItem& a, const MeasureItem& b, double p) {
  if (a.width > 0.0 && b.width > 0.0) return std::pow(std::abs(a.center - b.center), p);
  if (a.width > 0.0) return segment_cost(a.center - a.width / 2, a.center + a.width / 2, b.center, p) / a.width;
  if (b.width > 0.0) return segment_cost(b.center - b.width / 2, b.center + b.width / 2, a.center, p) / b.width;
  return std::pow(std::abs(a.center - b.center), p);
}

BalancedPlan solve_balanced(const DiscreteMeasure& a, const DiscreteMeasure& b, const CostSpec& cost) {
  cost.validate();
  for (const auto* m : {&a, &b})
    for (const auto& it : m->items)
      require(std::isfinite(it.center) && it.width >= 0.0 && it.mass >= 0.0, "measure items need finite centers and nonnegative mass");
  const double ma = a.total_mass(), mb = b.total_mass();
  if (std::abs(ma - mb) > 1e-9 * std::max(1.0, std::max(ma, mb))) {
    std::ostringstream os;
    os.precision(17);
    os << "balanced transport needs equal masses (got " << ma << " and " << mb << ")";
    throw InvalidArgument(os.str());
  }
  const double p = cost.p;
  const double tiny = 1e-14 * std::max(1.0, ma);
  BalancedPlan plan;

  std::vector<double> ra(a.items.size()), rb(b.items.size());
  for (std::size_t i = 0; i < ra.size(); ++i) ra[i] = a.items[i].mass;
  for (std::size_t j = 0; j < rb.size(); ++j) rb[j] = b.items[j].mass;

  const bool uniform_kind = single_kind(a, b);
  if (uniform_kind) {
    // Strip common mass at identical items.
    const auto ia = order_by_key(a), ib = order_by_key(b);
    std::size_t x = 0, y = 0;
    while (x < ia.size() && y < ib.size()) {
      const auto& u = a.items[ia[x]];
      const auto& v = b.items[ib[y]];
      if (u.center < v.center) { ++x; continue; }
      if (v.center < u.center) { ++y; continue; }
      std::size_t x_end = x, y_end = y;
      while (x_end < ia.size() && a.items[ia[x_end]].center == u.center) ++x_end;
      while (y_end < ib.size() && b.items[ib[y_end]].center == u.center) ++y_end;
      std::size_t s = x, t = y;
      while (s < x_end && t < y_end) {
        const double m = std::min(ra[ia[s]], rb[ib[t]]);
        if (m > 0.0) plan.entries.push_back({ia[s], ib[t], m});
        ra[ia[s]] -= m;
        rb[ib[t]] -= m;
        if (ra[ia[s]] <= tiny) ++s;
        if (rb[ib[t]] <= tiny) ++t;
      }
      x = x_end;
      y = y_end;
    }
  }

  std::vector<Residual> sa, sb;
  for (std::size_t i = 0; i < ra.size(); ++i)
    if (ra[i] > tiny) sa.push_back({i, a.items[i].center, ra[i]});
  for (std::size_t j = 0; j < rb.size(); ++j)
    if (rb[j] > tiny) sb.push_back({j, b.items[j].center, rb[j]});

  if (sa.empty() || sb.empty()) {
    plan.method = "identity";
  } else {
    auto by_center = [](const Residual& u, const Residual& v) { return u.center < v.center; };
    std::stable_sort(sa.begin(), sa.end(), by_center);
    std::stable_sort(sb.begin(), sb.end(), by_center);
    const bool a_left = sa.back().center <= sb.front().center;
    const bool a_right = sb.back().center <= sa.front().center;
    if (uniform_kind && (a_left || a_right)) {
      // Order-reversing plan: the supply item closest to the demand side is
      // matched with the closest demand item, and so on outwards.
      plan.method = "nested";
      if (a_left) std::reverse(sa.begin(), sa.end());
      else std::reverse(sb.begin(), sb.end());
      std::size_t s = 0, t = 0;
      while (s < sa.size() && t < sb.size()) {
        const double m = std::min(sa[s].mass, sb[t].mass);
        plan.entries.push_back({sa[s].index, sb[t].index, m});
        sa[s].mass -= m;
        sb[t].mass -= m;
        if (sa[s].mass <= tiny) ++s;
        if (sb[t].mass <= tiny) ++t;
      }
    } else {
      plan.method = "simplex";
      const int na = static_cast<int>(sa.size()), nb = static_cast<int>(sb.size());
      double max_cost = 0.0;
      std::vector<double> c(static_cast<std::size_t>(na) * nb);
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
          c[static_cast<std::size_t>(i) * nb + j] = item_cost(a.items[sa[i].index], b.items[sb[j].index], p);
          max_cost = std::max(max_cost, c[static_cast<std::size_t>(i) * nb + j]);
        }
      NetworkSimplex<double> ns(na + nb, (max_cost + 1.0) * (na + nb + 1));
      double sum_a = 0.0, sum_b = 0.0;
      for (const auto& r : sa) sum_a += r.mass;
      for (const auto& r : sb) sum_b += r.mass;
      for (int i = 0; i < na; ++i) ns.set_supply(i, sa[i].mass);
      for (int j = 0; j < nb; ++j) ns.set_supply(na + j, -sb[j].mass * (sum_a / sum_b));
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) ns.add_arc(i, na + j, c[static_cast<std::size_t>(i) * nb + j]);
      if (ns.run() != NetworkSimplex<double>::Status::optimal)
        throw SolverFailure("network simplex failed on the balanced instance");
      for (int e = 0; e < ns.arc_count(); ++e) {
        const double f = ns.flow(e);
        if (f > tiny) plan.entries.push_back({sa[ns.arc_source(e)].index, sb[ns.arc_target(e) - na].index, f});
      }
    }
  }

  for (const auto& e : plan.entries) plan.cost += e.mass * item_cost(a.items[e.from], b.items[e.to], p);
  return plan;
}

}  // namespace otlab
