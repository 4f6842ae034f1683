#include "otlab/sine_kernel.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "otlab/error.hpp"
#include "otlab/samplers.hpp"

namespace otlab {
namespace {

constexpr std::uint64_t kSaltSine = 0x21;

double kernel_at(double d, int m) {
  const double x = std::numbers::pi * d / m;
  return (x == 0.0 ? 1.0 : std::sin(x) / x) / m;
}

struct HalfSolve {
  std::vector<double> all;      // ascending
  std::vector<double> values;   // ascending, above the floor
  std::vector<double> vectors;  // column-major size x values.size()
};

// Symmetric eigenproblem: full spectrum through dsterf, eigenvectors only
// for the eigenvalues above the floor through dstemr.
HalfSolve solve_symmetric(std::vector<double> a, lapack_int size) {
  HalfSolve out;
  if (size == 0) return out;
  std::vector<double> d(size), e(std::max<lapack_int>(size - 1, 1)), tau(std::max<lapack_int>(size - 1, 1));
  if (LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', size, a.data(), size, d.data(), e.data(), tau.data()) != 0)
    throw SolverFailure("tridiagonal reduction of the sine kernel failed");

  out.all = d;
  std::vector<double> e_copy = e;
  if (LAPACKE_dsterf(size, out.all.data(), e_copy.data()) != 0)
    throw SolverFailure("eigenvalue iteration for the sine kernel did not converge");

  const auto keep = static_cast<lapack_int>(
      out.all.end() - std::upper_bound(out.all.begin(), out.all.end(), SineSpectrum::kEigenFloor));
  if (keep == 0) return out;

  lapack_int found = 0;
  out.values.assign(size, 0.0);
  out.vectors.assign(static_cast<std::size_t>(size) * keep, 0.0);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(keep));
  lapack_logical tryrac = 1;
  std::vector<double> d2 = d, e2(size, 0.0);
  std::copy(e.begin(), e.begin() + (size - 1), e2.begin());
  if (LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', size, d2.data(), e2.data(), 0.0, 0.0, size - keep + 1, size, &found,
                     out.values.data(), out.vectors.data(), size, keep, support.data(), &tryrac) != 0 ||
      found != keep) {
    // MRRR can fail on tight clusters near 1; bisection plus inverse
    // iteration is slower but robust.
    lapack_int nsplit = 0;
    std::vector<lapack_int> block(size), split(size), fail(keep);
    std::vector<double> e3(e.begin(), e.begin() + std::max<lapack_int>(size - 1, 0));
    e3.resize(std::max<lapack_int>(size, 1), 0.0);
    if (LAPACKE_dstebz('I', 'B', size, 0.0, 0.0, size - keep + 1, size, 0.0, d.data(), e3.data(), &found, &nsplit,
                       out.values.data(), block.data(), split.data()) != 0 ||
        found != keep ||
        LAPACKE_dstein(LAPACK_COL_MAJOR, size, d.data(), e3.data(), keep, out.values.data(), block.data(),
                       split.data(), out.vectors.data(), size, fail.data()) != 0)
      throw SolverFailure("eigenvector computation for the sine kernel failed");
  }
  out.values.resize(keep);
  if (size > 1 && LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', size, keep, a.data(), size, tau.data(),
                                 out.vectors.data(), size) != 0)
    throw SolverFailure("back-transformation of sine-kernel eigenvectors failed");
  return out;
}

std::shared_ptr<const SineSpectrum> compute_spectrum(std::size_t grid, int m) {
  auto spec = std::make_shared<SineSpectrum>();
  spec->grid = grid;
  spec->m = m;
  const auto size = static_cast<lapack_int>(grid);

  std::vector<HalfSolve> parts;
  std::vector<int> parity;
  if (grid % 2 == 0) {
    // Centrosymmetric split: symmetric vectors [x; Jx] solve A + CJ,
    // antisymmetric ones [x; -Jx] solve A - CJ.
    const lapack_int h = size / 2;
    for (int sign : {1, -1}) {
      std::vector<double> a(static_cast<std::size_t>(h) * h);
      for (lapack_int j = 0; j < h; ++j)
        for (lapack_int i = j; i < h; ++i)
          a[i + static_cast<std::size_t>(j) * h] =
              kernel_at(static_cast<double>(i - j), m) + sign * kernel_at(static_cast<double>(i + j - size + 1), m);
      parts.push_back(solve_symmetric(std::move(a), h));
      parity.push_back(sign);
    }
  } else {
    std::vector<double> a(grid * grid);
    for (lapack_int j = 0; j < size; ++j)
      for (lapack_int i = j; i < size; ++i) a[i + static_cast<std::size_t>(j) * size] = kernel_at(i - j, m);
    parts.push_back(solve_symmetric(std::move(a), size));
    parity.push_back(0);
  }

  for (const auto& part : parts) spec->all_values.insert(spec->all_values.end(), part.all.begin(), part.all.end());
  std::sort(spec->all_values.begin(), spec->all_values.end());
  if (!spec->all_values.empty() &&
      (spec->all_values.front() < -1e-6 || spec->all_values.back() > 1.0 + 1e-6)) {
    std::ostringstream os;
    os << "sine-kernel discretization produced eigenvalues in [" << spec->all_values.front() << ", "
       << spec->all_values.back() << "], outside [0, 1] by more than 1e-6; increase the grid resolution m";
    throw DiscretizationFailure(os.str());
  }

  std::size_t total = 0;
  for (const auto& part : parts) total += part.values.size();
  spec->values.reserve(total);
  spec->vectors.assign(grid * total, 0.0);
  std::size_t col = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    const std::size_t rows = parity[p] == 0 ? grid : grid / 2;
    for (std::size_t c = 0; c < part.values.size(); ++c, ++col) {
      spec->values.push_back(std::clamp(part.values[c], 0.0, 1.0));
      double* out = spec->vectors.data() + col * grid;
      const double* x = part.vectors.data() + c * rows;
      if (parity[p] == 0) {
        std::copy(x, x + rows, out);
      } else {
        const double s = std::numbers::sqrt2 / 2.0;
        for (std::size_t i = 0; i < rows; ++i) {
          out[i] = s * x[i];
          out[grid - 1 - i] = parity[p] * s * x[i];
        }
      }
    }
  }
  return spec;
}

}  // namespace

std::vector<double> sine_kernel_matrix(std::size_t grid, int m) {
  std::vector<double> k(grid * grid);
  for (std::size_t i = 0; i < grid; ++i)
    for (std::size_t j = 0; j < grid; ++j)
      k[i * grid + j] = kernel_at(static_cast<double>(i) - static_cast<double>(j), m);
  return k;
}

std::shared_ptr<const SineSpectrum> sine_spectrum(std::size_t grid, int m) {
  require(m >= 1, "sine kernel grid resolution must be positive");
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const SineSpectrum>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{grid, m}];
  if (!slot) slot = compute_spectrum(grid, m);
  return slot;
}

std::vector<std::size_t> sample_discrete_dpp(const SineSpectrum& spectrum, Stream& rng) {
  const std::size_t n = spectrum.grid;
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < spectrum.values.size(); ++c)
    if (rng.uniform() < spectrum.values[c]) chosen.push_back(c);
  const std::size_t k = chosen.size();
  std::vector<std::size_t> cells;
  if (k == 0) return cells;

  // Row-major copy of the selected eigenvectors; the active block shrinks by
  // one column per draw.
  std::vector<double> v(n * k);
  for (std::size_t c = 0; c < k; ++c) {
    const double* col = spectrum.vectors.data() + chosen[c] * n;
    for (std::size_t i = 0; i < n; ++i) v[i * k + c] = col[i];
  }
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += v[i * k + c] * v[i * k + c];
    norms[i] = s;
  }

  std::vector<double> u(k);
  cells.reserve(k);
  for (std::size_t active = k; active > 0; --active) {
    double total = 0.0;
    for (double w : norms) total += w;
    double target = rng.uniform() * total;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (norms[i] <= 0.0) continue;
      pick = i;
      if (target < norms[i]) break;
      target -= norms[i];
    }
    if (pick == n) throw SolverFailure("projection sampling ran out of mass");
    cells.push_back(pick);

    // Householder reflection mapping row `pick` onto the last active axis,
    // after which that axis is dropped.
    const double* row = v.data() + pick * k;
    double len2 = 0.0;
    for (std::size_t c = 0; c < active; ++c) len2 += row[c] * row[c];
    const double alpha = row[active - 1] >= 0.0 ? -std::sqrt(len2) : std::sqrt(len2);
    std::copy(row, row + active, u.begin());
    u[active - 1] -= alpha;
    double beta = 0.0;
    for (std::size_t c = 0; c < active; ++c) beta += u[c] * u[c];
    if (beta > 0.0) {
      const double scale = 2.0 / beta;
      for (std::size_t i = 0; i < n; ++i) {
        double* r = v.data() + i * k;
        double w = 0.0;
        for (std::size_t c = 0; c < active; ++c) w += r[c] * u[c];
        w *= scale;
        if (w != 0.0)
          for (std::size_t c = 0; c < active; ++c) r[c] -= w * u[c];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double last = v[i * k + active - 1];
      norms[i] = std::max(0.0, norms[i] - last * last);
    }
    norms[pick] = 0.0;
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

PointConfiguration sample_sine_dpp(const WindowSpec& window, int m, SeedPair seed) {
  window.validate();
  require(!window.is_torus(), "the sine-kernel process is sampled on interval windows only");
  require(m >= 8, "sine kernel grid resolution m must be >= 8");
  const double scaled = window.length * m;
  const double grid = std::round(scaled);
  require(std::abs(scaled - grid) < 1e-9, "window length times m must be an integer");

  PointConfiguration config;
  config.window = window;
  config.seed = seed;
  if (grid == 0.0) return config;
  const auto spectrum = sine_spectrum(static_cast<std::size_t>(grid), m);
  Stream rng(seed, kSaltSine);
  const auto cells = sample_discrete_dpp(*spectrum, rng);
  config.points.reserve(cells.size());
  for (std::size_t c : cells) config.points.push_back((static_cast<double>(c) + rng.uniform()) / m);
  sort_and_separate(config.points);
  return config;
}

}  // namespace otlab
