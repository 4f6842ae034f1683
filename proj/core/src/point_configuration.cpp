#include "otlab/point_configuration.hpp"

#include <algorithm>
#include <cmath>

#include "otlab/error.hpp"

namespace otlab {

void WindowSpec::validate() const {
  require(std::isfinite(length) && length >= 0.0, "window length must be finite and nonnegative");
  require(std::isfinite(padding) && padding >= 0.0, "window padding must be nonnegative");
  require(!(is_torus() && padding != 0.0), "torus windows carry no padding");
  require(!(is_torus() && length <= 0.0), "torus circumference must be positive");
}

std::size_t count_sorted(std::span<const double> sorted, double a, double b) {
  if (b <= a) return 0;
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), a);
  const auto hi = std::lower_bound(lo, sorted.end(), b);
  return static_cast<std::size_t>(hi - lo);
}

std::size_t PointConfiguration::count(double a, double b) const {
  if (!window.is_torus()) return count_sorted(points, a, b);
  const double n = window.length;
  const double span = b - a;
  if (span <= 0.0) return 0;
  if (span >= n) {
    const double whole = std::floor(span / n);
    return static_cast<std::size_t>(whole) * points.size() + count(a + whole * n, b);
  }
  double start = std::fmod(a, n);
  if (start < 0.0) start += n;
  const double end = start + span;
  if (end <= n) return count_sorted(points, start, end);
  return count_sorted(points, start, n) + count_sorted(points, 0.0, end - n);
}

std::vector<double> PointConfiguration::restrict_to(double a, double b) const {
  require(!window.is_torus(), "restrict_to is defined for interval windows");
  const auto lo = std::lower_bound(points.begin(), points.end(), a);
  const auto hi = std::lower_bound(lo, points.end(), b);
  return {lo, hi};
}

void sort_and_separate(std::vector<double>& points) {
  std::sort(points.begin(), points.end());
  std::size_t i = 0;
  while (i < points.size()) {
    std::size_t j = i + 1;
    while (j < points.size() && points[j] == points[i]) ++j;
    for (std::size_t k = i + 1; k < j; ++k) points[k] += static_cast<double>(k - i) * 1e-12;
    i = j;
  }
}

}  // namespace otlab
