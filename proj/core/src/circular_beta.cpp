#include "otlab/circular_beta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "otlab/error.hpp"
#include "otlab/samplers.hpp"

namespace otlab {
namespace {

constexpr std::uint64_t kSaltCbeta = 0x31;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Phase {
  double psi;
  double slope;
};

// Matched Pruefer phase F(theta) = psi_m(theta) - phi_m(theta): psi runs
// forward from psi_0 = theta through the Blaschke factors
// u -> e^{i theta} (u - conj(a)) / (1 - a u), phi runs backward from
// phi_{N-1} = offset through their inverses. F increases by 2 pi N per turn
// and the eigenangles solve F = 2 pi j. Shooting from both ends avoids the
// staircase shape the one-sided phase has when the last coefficients lie
// near the unit circle. Re(1 - a u) > 0, so its argument is an atan.
Phase matched_phase(const std::vector<std::complex<double>>& alpha, double theta, double offset) {
  const std::size_t n = alpha.size();
  const std::size_t m = (n - 1) / 2;
  const double er = std::cos(theta), ei = std::sin(theta);

  double psi = theta, dpsi = 1.0;
  double ur = er, ui = ei;
  for (std::size_t k = 0; k < m; ++k) {
    const double ar = alpha[k].real(), ai = alpha[k].imag();
    const double zr = ar * ur - ai * ui, zi = ar * ui + ai * ur;
    const double wr = 1.0 - zr, wi = -zi;
    const double w2 = wr * wr + wi * wi;
    const double gain = 1.0 + 2.0 * (zr * wr + zi * wi) / w2;
    psi += theta - 2.0 * std::atan(wi / wr);
    dpsi = 1.0 + dpsi * gain;
    const double cr = (wr * wr - wi * wi) / w2, ci = -2.0 * wr * wi / w2;
    const double vr = ur * cr - ui * ci, vi = ur * ci + ui * cr;
    ur = er * vr - ei * vi;
    ui = er * vi + ei * vr;
    const double norm = 1.0 / std::sqrt(ur * ur + ui * ui);
    ur *= norm;
    ui *= norm;
  }

  double phi = offset, dphi = 0.0;
  double vr = std::cos(offset), vi = std::sin(offset);
  for (std::size_t k = n - 1; k-- > m;) {
    const double xr0 = er * vr + ei * vi, xi0 = er * vi - ei * vr;  // e^{-i theta} v
    const double ar = alpha[k].real(), ai = alpha[k].imag();
    const double nr = xr0 + ar, ni = xi0 - ai;
    const double dr = 1.0 + ar * xr0 - ai * xi0, di = ar * xi0 + ai * xr0;
    const double dd = dr * dr + di * di;
    double xr = (nr * dr + ni * di) / dd, xi = (ni * dr - nr * di) / dd;
    const double norm = 1.0 / std::sqrt(xr * xr + xi * xi);
    xr *= norm;
    xi *= norm;
    const double zr = ar * xr - ai * xi, zi = ar * xi + ai * xr;
    const double wr = 1.0 - zr, wi = -zi;
    const double w2 = wr * wr + wi * wi;
    const double gain = 1.0 + 2.0 * (zr * wr + zi * wi) / w2;
    phi += 2.0 * std::atan(wi / wr) - theta;
    dphi = (dphi - 1.0) / gain;
    vr = xr;
    vi = xi;
  }
  return {psi - phi, dpsi - dphi};
}

}  // namespace

std::vector<std::complex<double>> cbeta_verblunsky(std::size_t num_points, double beta, Stream& rng) {
  require(num_points >= 1, "circular beta needs at least one point");
  require(std::isfinite(beta) && beta > 0.0, "circular beta requires beta > 0");
  std::vector<std::complex<double>> alpha(num_points);
  for (std::size_t k = 0; k < num_points; ++k) {
    const double angle = kTwoPi * rng.uniform();
    double radius = 1.0;
    if (k + 1 < num_points) radius = std::sqrt(rng.beta_one(0.5 * beta * static_cast<double>(num_points - k - 1)));
    alpha[k] = std::polar(radius, angle);
  }
  return alpha;
}

std::vector<double> cmv_eigenangles(const std::vector<std::complex<double>>& alpha) {
  const std::size_t n = alpha.size();
  require(n >= 1, "CMV matrix needs at least one coefficient");
  require(std::abs(std::abs(alpha.back()) - 1.0) < 1e-12, "last Verblunsky coefficient must lie on the unit circle");
  for (std::size_t k = 0; k + 1 < n; ++k)
    require(std::abs(alpha[k]) < 1.0, "Verblunsky coefficients must lie in the open unit disk");

  const double offset = std::arg(std::conj(alpha.back()));
  const std::size_t grid = n;
  std::vector<double> theta(grid + 1), f(grid + 1);
  for (std::size_t g = 0; g <= grid; ++g) {
    theta[g] = kTwoPi * static_cast<double>(g) / static_cast<double>(grid);
    f[g] = matched_phase(alpha, theta[g], offset).psi;
    if (g > 0 && f[g] < f[g - 1]) throw SolverFailure("matched Pruefer phase is not increasing; eigenangle search failed");
  }
  if (std::abs(f[grid] - f[0] - kTwoPi * static_cast<double>(n)) > 1e-6 * static_cast<double>(n))
    throw SolverFailure("Pruefer phase winding differs from the matrix size");

  std::vector<double> roots;
  roots.reserve(n);
  const double first = std::ceil(f[0] / kTwoPi);
  std::size_t g = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double target = kTwoPi * (first + static_cast<double>(j));
    while (g + 1 < grid && f[g + 1] <= target) ++g;
    if (f[g] > target || f[g + 1] <= target) throw SolverFailure("eigenangle bracket not found");
    double lo = theta[g], hi = theta[g + 1];
    if (f[g] == target) {
      roots.push_back(lo);
      continue;
    }
    double x = lo + (target - f[g]) / (f[g + 1] - f[g]) * (hi - lo);
    for (int it = 0; it < 200; ++it) {
      const Phase ph = matched_phase(alpha, x, offset);
      const double r = ph.psi - target;
      if (r < 0.0) lo = x; else hi = x;
      // The accumulated phase carries O(n eps |psi|) rounding, so steps below
      // 1e-13 rad are noise.
      const double step = r / ph.slope;
      if (std::abs(step) < 1e-13 || hi - lo < 1e-13) break;
      double next = x - step;
      // The phase is nearly a staircase for large N; outside the bracket,
      // bisect instead.
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    roots.push_back(x);
  }
  for (auto& r : roots) {
    r = std::fmod(r, kTwoPi);
    if (r < 0.0) r += kTwoPi;
  }
  std::sort(roots.begin(), roots.end());
  if (roots.size() != n) throw SolverFailure("eigenangle count differs from the matrix size");
  return roots;
}

PointConfiguration sample_circular_beta(std::size_t num_points, double beta, SeedPair seed) {
  require(num_points >= 2, "circular beta needs at least two points");
  Stream rng(seed, kSaltCbeta);
  const auto alpha = cbeta_verblunsky(num_points, beta, rng);
  const auto angles = cmv_eigenangles(alpha);
  PointConfiguration config;
  config.window = WindowSpec::torus(static_cast<double>(num_points));
  config.seed = seed;
  const double scale = static_cast<double>(num_points) / kTwoPi;
  config.points.reserve(num_points);
  for (double a : angles) config.points.push_back(std::min(a * scale, std::nextafter(config.window.length, 0.0)));
  sort_and_separate(config.points);
  return config;
}

}  // namespace otlab
