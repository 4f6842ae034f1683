#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "otlab/random.hpp"

namespace otlab {

/// Verblunsky coefficients of the Killip-Nenciu model of the circular beta
/// ensemble: alpha_k ~ Theta_{beta (N - k - 1) + 1} for k < N - 1 and
/// alpha_{N-1} uniform on the unit circle.
std::vector<std::complex<double>> cbeta_verblunsky(std::size_t num_points, double beta, Stream& rng);

/// Eigenangles in [0, 2 pi), ascending, of the CMV matrix with the given
/// coefficients (the last one on the unit circle). They are the solutions of
/// psi_{N-1}(theta) = arg(conj(alpha_{N-1})) mod 2 pi for the Pruefer phase
/// psi_0 = theta, psi_{k+1} = theta + psi_k - 2 arg(1 - alpha_k e^{i psi_k}),
/// which increases by 2 pi N over one turn. The roots are located by shooting
/// from both ends and matching at the middle index. Throws SolverFailure if
/// the root count is not N.
std::vector<double> cmv_eigenangles(const std::vector<std::complex<double>>& alpha);

}  // namespace otlab
