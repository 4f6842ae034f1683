#pragma once

#include <cstddef>

#include "otlab/point_configuration.hpp"
#include "otlab/process_model.hpp"

namespace otlab {

/// Homogeneous Poisson process of unit intensity on the window.
PointConfiguration sample_poisson(const WindowSpec& window, SeedPair seed);

/// Exactly `count` i.i.d. uniform points on the window (binomial process).
/// On a torus with count == length this is the conditioned Poisson surrogate.
PointConfiguration sample_uniform_points(const WindowSpec& window, std::size_t count, SeedPair seed);

/// Poisson process conditioned on at least `min_count` points: the count is
/// drawn from the truncated Poisson law by inversion, positions are uniform.
PointConfiguration sample_poisson_at_least(const WindowSpec& window, std::size_t min_count, SeedPair seed);

/// Sites k + 1/2 + U + sigma * xi_k with a global phase U ~ U[0,1). On the
/// interval, sites with k in [-ceil(4 sigma) - 1, n + ceil(4 sigma) + 1) are
/// generated and those in [0, n) kept; sites further out reach the window
/// with probability below 6e-5 each. On a torus (integer circumference)
/// exactly n sites are wrapped.
PointConfiguration sample_perturbed_lattice(const WindowSpec& window, double sigma, SeedPair seed);

/// Stationary renewal process: the first point lies at U * L with L drawn
/// from the length-biased interarrival law, later gaps are i.i.d.
PointConfiguration sample_renewal(const WindowSpec& window, const InterarrivalLaw& law, SeedPair seed);

/// Stationary renewal process with Pareto(alpha) gaps of unit mean
/// (x_m = (alpha - 1) / alpha). The delay uses the closed-form inverse of the
/// integrated-tail distribution.
PointConfiguration sample_heavytail(const WindowSpec& window, double alpha, SeedPair seed);

/// Sine-kernel determinantal process on [0, n), interval only. See
/// sine_kernel.hpp for the discretization.
PointConfiguration sample_sine_dpp(const WindowSpec& window, int m, SeedPair seed);

/// Circular beta ensemble of `num_points` eigenangles rescaled to a torus of
/// circumference `num_points`.
PointConfiguration sample_circular_beta(std::size_t num_points, double beta, SeedPair seed);

/// Dispatches on the model. Throws InvalidArgument for unsupported
/// model/topology pairs (circular beta needs a torus with integer
/// circumference; the sine kernel needs an interval).
PointConfiguration sample(const ProcessModel& model, const WindowSpec& window, SeedPair seed);

}  // namespace otlab
