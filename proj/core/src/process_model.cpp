#include "otlab/process_model.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "otlab/error.hpp"

namespace otlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    throw InvalidArgument("model parameter '" + key + "' is not a number: '" + text + "'");
  return value;
}

using Params = std::map<std::string, std::string>;

Params parse_params(const std::string& text) {
  Params params;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("model parameter must be key=value: '" + item + "'");
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

void reject_unknown(const Params& params, std::initializer_list<const char*> known, const std::string& name) {
  for (const auto& [key, value] : params) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw InvalidArgument("unknown parameter '" + key + "' for model '" + name + "'");
  }
}

double get(const Params& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_real(key, it->second);
}

}  // namespace

double InterarrivalLaw::mean() const {
  switch (kind) {
    case Kind::deterministic: return scale;
    case Kind::gamma: return shape * scale;
    case Kind::uniform: return scale / 2.0;
  }
  return 0.0;
}

double InterarrivalLaw::variance() const {
  switch (kind) {
    case Kind::deterministic: return 0.0;
    case Kind::gamma: return shape * scale * scale;
    case Kind::uniform: return scale * scale / 12.0;
  }
  return 0.0;
}

void InterarrivalLaw::validate() const {
  require(std::isfinite(shape) && shape > 0.0, "interarrival shape must be positive");
  require(std::isfinite(scale) && scale > 0.0, "interarrival scale must be positive");
  if (std::abs(mean() - 1.0) > 1e-9)
    throw InvalidArgument("interarrival law must have unit mean (got " + fmt_real(mean()) + ")");
}

void validate(const ProcessModel& model) {
  std::visit(Overloaded{
                 [](const Poisson&) {},
                 [](const PerturbedLattice& m) {
                   require(std::isfinite(m.sigma) && m.sigma >= 0.0, "lattice sigma must be >= 0");
                 },
                 [](const Renewal& m) { m.law.validate(); },
                 [](const HeavyTailRenewal& m) {
                   require(m.alpha > 1.0 && m.alpha < 2.0, "heavy-tail alpha must lie in (1, 2)");
                 },
                 [](const SineKernelDPP& m) { require(m.m >= 8, "sine kernel grid resolution m must be >= 8"); },
                 [](const CircularBeta& m) {
                   require(std::isfinite(m.beta) && m.beta > 0.0, "circular beta requires beta > 0");
                 },
             },
             model);
}

ProcessModel parse_model(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const Params params = colon == std::string::npos ? Params{} : parse_params(spec.substr(colon + 1));

  ProcessModel model;
  if (name == "poisson") {
    reject_unknown(params, {}, name);
    model = Poisson{};
  } else if (name == "lattice") {
    reject_unknown(params, {"sigma"}, name);
    model = PerturbedLattice{get(params, "sigma", 0.0)};
  } else if (name == "renewal") {
    reject_unknown(params, {"law", "shape", "scale", "value", "upper"}, name);
    const auto it = params.find("law");
    const std::string law = it == params.end() ? "gamma" : it->second;
    InterarrivalLaw l;
    if (law == "deterministic") {
      reject_unknown(params, {"law", "value"}, name);
      l = {InterarrivalLaw::Kind::deterministic, 1.0, get(params, "value", 1.0)};
    } else if (law == "gamma") {
      reject_unknown(params, {"law", "shape", "scale"}, name);
      const double shape = get(params, "shape", 1.0);
      l = {InterarrivalLaw::Kind::gamma, shape, get(params, "scale", 1.0 / shape)};
    } else if (law == "uniform") {
      reject_unknown(params, {"law", "upper"}, name);
      l = {InterarrivalLaw::Kind::uniform, 1.0, get(params, "upper", 2.0)};
    } else {
      throw InvalidArgument("unknown renewal law '" + law + "'");
    }
    model = Renewal{l};
  } else if (name == "heavytail") {
    reject_unknown(params, {"alpha"}, name);
    model = HeavyTailRenewal{get(params, "alpha", 1.5)};
  } else if (name == "sine") {
    reject_unknown(params, {"m"}, name);
    const double m = get(params, "m", 32.0);
    require(m == std::floor(m), "sine kernel m must be an integer");
    model = SineKernelDPP{static_cast<int>(m)};
  } else if (name == "cbeta") {
    reject_unknown(params, {"beta"}, name);
    model = CircularBeta{get(params, "beta", 2.0)};
  } else {
    throw InvalidArgument("unknown process model '" + name + "'");
  }
  validate(model);
  return model;
}

std::string to_string(const ProcessModel& model) {
  return std::visit(
      Overloaded{
          [](const Poisson&) { return std::string("poisson"); },
          [](const PerturbedLattice& m) { return "lattice:sigma=" + fmt_real(m.sigma); },
          [](const Renewal& m) {
            switch (m.law.kind) {
              case InterarrivalLaw::Kind::deterministic:
                return "renewal:law=deterministic,value=" + fmt_real(m.law.scale);
              case InterarrivalLaw::Kind::gamma:
                return "renewal:law=gamma,shape=" + fmt_real(m.law.shape) + ",scale=" + fmt_real(m.law.scale);
              case InterarrivalLaw::Kind::uniform:
                return "renewal:law=uniform,upper=" + fmt_real(m.law.scale);
            }
            return std::string("renewal");
          },
          [](const HeavyTailRenewal& m) { return "heavytail:alpha=" + fmt_real(m.alpha); },
          [](const SineKernelDPP& m) { return "sine:m=" + std::to_string(m.m); },
          [](const CircularBeta& m) { return "cbeta:beta=" + fmt_real(m.beta); },
      },
      model);
}

bool supports_interval(const ProcessModel& model) { return !std::holds_alternative<CircularBeta>(model); }

bool supports_torus(const ProcessModel& model) {
  return std::holds_alternative<Poisson>(model) || std::holds_alternative<PerturbedLattice>(model) ||
         std::holds_alternative<CircularBeta>(model);
}

}  // namespace otlab
