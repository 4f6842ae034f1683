#pragma once

#include <cstdint>
#include <random>

namespace otlab {

/// Counter-style seed: a global campaign seed plus the replica index.
/// Every random quantity in the library is a pure function of this pair
/// (and a per-purpose salt), so results do not depend on scheduling.
struct SeedPair {
  std::uint64_t global = 0;
  std::uint64_t replica = 0;

  friend bool operator==(const SeedPair&, const SeedPair&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Random stream derived from a SeedPair. Thin wrapper over mt19937_64 with
/// the handful of variates the samplers need.
class Stream {
 public:
  Stream(SeedPair seed, std::uint64_t salt = 0);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();
  double exponential();
  double gamma(double shape);
  /// Beta(1, b) via inversion.
  double beta_one(double b);
  long poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace otlab
