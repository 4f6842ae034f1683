#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "otlab/random.hpp"

namespace otlab {

/// Eigen-data of the discretized sine kernel on [0, N/m): grid points
/// x_i = (i + 1/2)/m and matrix K_ij = sinc(x_i - x_j)/m. The matrix is
/// positive semidefinite with spectrum in [0, 1] in exact arithmetic.
struct SineSpectrum {
  std::size_t grid = 0;
  int m = 0;
  /// Every eigenvalue, ascending, before clamping.
  std::vector<double> all_values;
  /// Eigenvalues above `kEigenFloor`, clamped to [0, 1].
  std::vector<double> values;
  /// Matching orthonormal eigenvectors, column-major grid x values.size().
  std::vector<double> vectors;

  /// Eigenvalues at or below this floor are treated as zero; the discarded
  /// expected count is at most grid * 1e-12.
  static constexpr double kEigenFloor = 1e-12;
};

/// Row-major grid x grid kernel matrix.
std::vector<double> sine_kernel_matrix(std::size_t grid, int m);

/// Cached and thread-safe. Throws DiscretizationFailure when an eigenvalue
/// leaves [-1e-6, 1 + 1e-6].
std::shared_ptr<const SineSpectrum> sine_spectrum(std::size_t grid, int m);

/// Sampled grid cells (ascending indices) of the discrete determinantal
/// process with the given spectrum, drawn by spectral selection followed by
/// sequential projection sampling.
std::vector<std::size_t> sample_discrete_dpp(const SineSpectrum& spectrum, Stream& rng);

}  // namespace otlab
