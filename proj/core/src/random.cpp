#include "otlab/random.hpp"

#include <cmath>

#include "otlab/error.hpp"

namespace otlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream::Stream(SeedPair seed, std::uint64_t salt) {
  const std::uint64_t a = splitmix64(seed.global ^ 0x6a09e667f3bcc909ULL);
  const std::uint64_t b = splitmix64(a ^ splitmix64(seed.replica + 0xbb67ae8584caa73bULL));
  const std::uint64_t c = splitmix64(b ^ splitmix64(salt + 0x3c6ef372fe94f82bULL));
  std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double Stream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Stream::exponential() { return -std::log1p(-uniform()); }

double Stream::gamma(double shape) {
  require(shape > 0.0, "gamma shape must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1, then scale by U^(1/shape).
    const double g = gamma(shape + 1.0);
    return g * std::pow(1.0 - uniform(), 1.0 / shape);
  }
  // Marsaglia and Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Stream::beta_one(double b) {
  require(b > 0.0, "beta parameter must be positive");
  return 1.0 - std::pow(1.0 - uniform(), 1.0 / b);
}

long Stream::poisson(double mean) {
  require(mean >= 0.0, "poisson mean must be nonnegative");
  if (mean == 0.0) return 0;
  std::poisson_distribution<long> dist(mean);
  return dist(engine_);
}

}  // namespace otlab
