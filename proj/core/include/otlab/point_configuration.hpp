#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otlab/random.hpp"

namespace otlab {

enum class Topology { interval, torus };

/// Observation window [0, length) on the line or a torus of circumference
/// `length`. `padding` is the supply overhang used by the transport solvers
/// and must be zero on a torus.
struct WindowSpec {
  double length = 0.0;
  Topology topology = Topology::interval;
  double padding = 0.0;

  static WindowSpec interval(double n, double padding = 0.0) {
    return {n, Topology::interval, padding};
  }
  static WindowSpec torus(double n) { return {n, Topology::torus, 0.0}; }

  bool is_torus() const { return topology == Topology::torus; }
  void validate() const;
};

/// Sorted realization of a simple point process restricted to a window.
struct PointConfiguration {
  std::vector<double> points;
  WindowSpec window;
  SeedPair seed;

  std::size_t size() const { return points.size(); }

  /// Number of points in [a, b). On a torus the arc wraps around.
  std::size_t count(double a, double b) const;

  /// Points in [a, b) (interval topology only), preserving order.
  std::vector<double> restrict_to(double a, double b) const;
};

/// Sorts `points` and separates exact ties by adding i * 1e-12 to the i-th
/// member of each tie group.
void sort_and_separate(std::vector<double>& points);

/// Number of entries of a sorted range lying in [a, b).
std::size_t count_sorted(std::span<const double> sorted, double a, double b);

}  // namespace otlab
