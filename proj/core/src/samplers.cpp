#include "otlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "otlab/error.hpp"

namespace otlab {
namespace {

// Salts keep the streams of different samplers apart for the same seed pair.
constexpr std::uint64_t kSaltPoisson = 0x11;
constexpr std::uint64_t kSaltUniform = 0x12;
constexpr std::uint64_t kSaltLattice = 0x13;
constexpr std::uint64_t kSaltRenewal = 0x14;
constexpr std::uint64_t kSaltHeavy = 0x15;

PointConfiguration make_config(const WindowSpec& window, SeedPair seed) {
  window.validate();
  PointConfiguration config;
  config.window = window;
  config.seed = seed;
  return config;
}

void fill_uniform(PointConfiguration& config, std::size_t count, Stream& rng) {
  config.points.resize(count);
  for (auto& x : config.points) x = config.window.length * rng.uniform();
  sort_and_separate(config.points);
}

double pareto_xm(double alpha) { return (alpha - 1.0) / alpha; }

template <class Gap>
void fill_renewal(PointConfiguration& config, double first, Gap&& gap) {
  const double n = config.window.length;
  for (double x = first; x < n; x += gap()) config.points.push_back(x);
  sort_and_separate(config.points);
}

}  // namespace

PointConfiguration sample_poisson(const WindowSpec& window, SeedPair seed) {
  auto config = make_config(window, seed);
  Stream rng(seed, kSaltPoisson);
  const long count = rng.poisson(window.length);
  fill_uniform(config, static_cast<std::size_t>(count), rng);
  return config;
}

PointConfiguration sample_uniform_points(const WindowSpec& window, std::size_t count, SeedPair seed) {
  auto config = make_config(window, seed);
  Stream rng(seed, kSaltUniform);
  fill_uniform(config, count, rng);
  return config;
}

PointConfiguration sample_poisson_at_least(const WindowSpec& window, std::size_t min_count, SeedPair seed) {
  auto config = make_config(window, seed);
  Stream rng(seed, kSaltPoisson);
  const double lambda = window.length;
  require(lambda > 0.0 || min_count == 0, "conditioning on a positive count needs a nonempty window");

  std::size_t count = min_count;
  if (lambda > 0.0) {
    // Truncated pmf relative to its first term; terms decay once k > lambda.
    std::vector<double> weights;
    double w = 1.0, total = 0.0;
    for (std::size_t k = min_count;; ++k) {
      weights.push_back(w);
      total += w;
      w *= lambda / static_cast<double>(k + 1);
      if (static_cast<double>(k) > lambda && w < 1e-17 * total) break;
    }
    double u = rng.uniform() * total;
    std::size_t j = 0;
    while (j + 1 < weights.size() && u >= weights[j]) u -= weights[j++];
    count = min_count + j;
  }
  fill_uniform(config, count, rng);
  return config;
}

PointConfiguration sample_perturbed_lattice(const WindowSpec& window, double sigma, SeedPair seed) {
  require(std::isfinite(sigma) && sigma >= 0.0, "lattice sigma must be >= 0");
  auto config = make_config(window, seed);
  Stream rng(seed, kSaltLattice);
  const double n = window.length;
  const double phase = rng.uniform();

  if (window.is_torus()) {
    require(n == std::floor(n), "perturbed lattice on a torus needs an integer circumference");
    const auto sites = static_cast<long>(n);
    config.points.reserve(static_cast<std::size_t>(sites));
    for (long k = 0; k < sites; ++k) {
      double x = std::fmod(static_cast<double>(k) + 0.5 + phase + sigma * rng.normal(), n);
      if (x < 0.0) x += n;
      if (x >= n) x -= n;
      config.points.push_back(x);
    }
  } else {
    const long reach = static_cast<long>(std::ceil(4.0 * sigma)) + 1;
    const long last = static_cast<long>(std::ceil(n)) + reach;
    for (long k = -reach; k < last; ++k) {
      const double x = static_cast<double>(k) + 0.5 + phase + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
      if (x >= 0.0 && x < n) config.points.push_back(x);
    }
  }
  sort_and_separate(config.points);
  return config;
}

PointConfiguration sample_renewal(const WindowSpec& window, const InterarrivalLaw& law, SeedPair seed) {
  law.validate();
  require(!window.is_torus(), "renewal processes are sampled on interval windows only");
  auto config = make_config(window, seed);
  Stream rng(seed, kSaltRenewal);

  using Kind = InterarrivalLaw::Kind;
  double biased = 0.0;
  switch (law.kind) {
    case Kind::deterministic: biased = law.scale; break;
    case Kind::gamma: biased = law.scale * rng.gamma(law.shape + 1.0); break;
    case Kind::uniform: biased = law.scale * std::sqrt(rng.uniform()); break;
  }
  const double first = rng.uniform() * biased;
  fill_renewal(config, first, [&] {
    switch (law.kind) {
      case Kind::deterministic: return law.scale;
      case Kind::gamma: return law.scale * rng.gamma(law.shape);
      case Kind::uniform: return law.scale * rng.uniform();
    }
    return 1.0;
  });
  return config;
}

PointConfiguration sample_heavytail(const WindowSpec& window, double alpha, SeedPair seed) {
  require(alpha > 1.0 && alpha < 2.0, "heavy-tail alpha must lie in (1, 2)");
  require(!window.is_torus(), "renewal processes are sampled on interval windows only");
  auto config = make_config(window, seed);
  Stream rng(seed, kSaltHeavy);
  const double xm = pareto_xm(alpha);

  // Integrated tail F_e(x) = x on [0, x_m] and
  // x_m + x_m / (alpha - 1) * (1 - (x / x_m)^(1 - alpha)) beyond; total mass 1.
  const double u = rng.uniform();
  double first = u;
  if (u > xm) {
    const double base = 1.0 - (u - xm) * (alpha - 1.0) / xm;
    first = xm * std::pow(std::max(base, 1e-300), -1.0 / (alpha - 1.0));
  }
  fill_renewal(config, first, [&] { return xm * std::pow(1.0 - rng.uniform(), -1.0 / alpha); });
  return config;
}

PointConfiguration sample(const ProcessModel& model, const WindowSpec& window, SeedPair seed) {
  validate(model);
  window.validate();
  if (window.is_torus() && !supports_torus(model))
    throw InvalidArgument("model '" + to_string(model) + "' cannot be sampled on a torus");
  if (!window.is_torus() && !supports_interval(model))
    throw InvalidArgument("model '" + to_string(model) + "' can only be sampled on a torus");

  if (std::holds_alternative<Poisson>(model)) return sample_poisson(window, seed);
  if (const auto* m = std::get_if<PerturbedLattice>(&model)) return sample_perturbed_lattice(window, m->sigma, seed);
  if (const auto* m = std::get_if<Renewal>(&model)) return sample_renewal(window, m->law, seed);
  if (const auto* m = std::get_if<HeavyTailRenewal>(&model)) return sample_heavytail(window, m->alpha, seed);
  if (const auto* m = std::get_if<SineKernelDPP>(&model)) return sample_sine_dpp(window, m->m, seed);
  const auto& cb = std::get<CircularBeta>(model);
  const double n = window.length;
  require(n == std::floor(n) && n >= 2.0, "circular beta needs an integer circumference >= 2");
  return sample_circular_beta(static_cast<std::size_t>(n), cb.beta, seed);
}

}  // namespace otlab
