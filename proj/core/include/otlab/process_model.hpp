#pragma once

#include <string>
#include <variant>

namespace otlab {

/// Interarrival law of a renewal process. Every law is normalized to unit
/// mean; `validate` rejects laws whose mean differs from 1 by more than 1e-9.
struct InterarrivalLaw {
  enum class Kind { deterministic, gamma, uniform };
  Kind kind = Kind::gamma;
  double shape = 1.0;  // gamma shape
  double scale = 1.0;  // gamma scale; deterministic value; uniform upper end (lower end 0)

  static InterarrivalLaw deterministic() { return {Kind::deterministic, 1.0, 1.0}; }
  static InterarrivalLaw gamma_unit_mean(double shape) { return {Kind::gamma, shape, 1.0 / shape}; }

  double mean() const;
  double variance() const;
  void validate() const;
};

struct Poisson {};
struct PerturbedLattice {
  double sigma = 0.0;
};
struct Renewal {
  InterarrivalLaw law;
};
/// Renewal process with Pareto interarrivals of tail index alpha in (1, 2),
/// scaled to unit mean.
struct HeavyTailRenewal {
  double alpha = 1.5;
};
/// Determinantal process with the sine kernel, discretized with `m` grid
/// points per unit length.
struct SineKernelDPP {
  int m = 32;
};
/// Circular beta ensemble; torus only.
struct CircularBeta {
  double beta = 2.0;
};

using ProcessModel =
    std::variant<Poisson, PerturbedLattice, Renewal, HeavyTailRenewal, SineKernelDPP, CircularBeta>;

/// Parses `name[:key=value,...]`, e.g. `poisson`, `lattice:sigma=0.5`,
/// `renewal:law=gamma,shape=4`, `heavytail:alpha=1.5`, `sine:m=32`,
/// `cbeta:beta=2`.
ProcessModel parse_model(const std::string& spec);

/// Canonical spec string; `parse_model(to_string(m))` reproduces `m`.
std::string to_string(const ProcessModel& model);

void validate(const ProcessModel& model);

bool supports_interval(const ProcessModel& model);
bool supports_torus(const ProcessModel& model);

}  // namespace otlab
