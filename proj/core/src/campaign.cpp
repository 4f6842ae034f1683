#include "otlab/campaign.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "otlab/dyadic.hpp"
#include "otlab/error.hpp"
#include "otlab/estimators.hpp"
#include "otlab/io.hpp"
#include "otlab/process_model.hpp"
#include "otlab/torus.hpp"
#include "otlab/transport.hpp"

#ifndef OTLAB_VERSION
#define OTLAB_VERSION "unknown"
#endif

namespace otlab {
namespace {

using nlohmann::json;

const std::set<std::string> kTasks{"variance", "absdev", "cost", "dyadic", "threshold", "shiftcoupling"};
const std::set<std::string> kKeys{"models", "n_grid",  "p_grid", "replicas", "seed", "delta",          "output_dir",
                                  "tasks",  "threads", "K",      "N",        "t_grid", "slope_tolerance"};

bool interval_task(const std::string& task) { return task != "shiftcoupling"; }

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' ? c : '_';
  return out;
}

std::string p_tag(double p) { return "p" + format_number(p); }

class Reader {
 public:
  Reader(const json& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

  template <class T>
  void get(const char* key, T& out) {
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(std::string("key '") + key + "' has the wrong type");
    }
  }

 private:
  const json& doc_;
  std::vector<std::string>& errors_;
};

void check_grid(const std::vector<double>& g, const char* name, std::vector<std::string>& errors) {
  if (g.empty()) errors.push_back(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(std::isfinite(g[i]) && g[i] > 0.0)) errors.push_back(std::string(name) + " entries must be positive");
    if (i > 0 && !(g[i - 1] < g[i])) errors.push_back(std::string(name) + " must be strictly increasing");
  }
}

}  // namespace

const char* version() { return OTLAB_VERSION; }

std::string normalized_json(const CampaignConfig& c) {
  json j;
  j["models"] = c.models;
  j["n_grid"] = c.n_grid;
  j["p_grid"] = c.p_grid;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["delta"] = c.delta;
  j["output_dir"] = c.output_dir;
  j["tasks"] = c.tasks;
  j["threads"] = c.threads;
  j["K"] = c.K;
  j["N"] = c.N;
  j["t_grid"] = c.t_grid;
  j["slope_tolerance"] = c.slope_tolerance;
  return j.dump(2) + "\n";
}

ConfigCheck validate_config_text(const std::string& text) {
  ConfigCheck check;
  auto& errors = check.errors;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return check;
  }
  if (!doc.is_object()) {
    errors.push_back("config must be a JSON object");
    return check;
  }
  for (const auto& [key, value] : doc.items())
    if (!kKeys.count(key)) errors.push_back("unknown key '" + key + "'");

  CampaignConfig c;
  Reader r(doc, errors);
  r.get("models", c.models);
  r.get("n_grid", c.n_grid);
  r.get("p_grid", c.p_grid);
  r.get("replicas", c.replicas);
  if (!doc.contains("seed")) errors.push_back("seed required");
  r.get("seed", c.seed);
  r.get("delta", c.delta);
  r.get("output_dir", c.output_dir);
  r.get("tasks", c.tasks);
  r.get("threads", c.threads);
  r.get("K", c.K);
  r.get("N", c.N);
  r.get("t_grid", c.t_grid);
  r.get("slope_tolerance", c.slope_tolerance);

  std::vector<ProcessModel> models;
  for (const auto& m : c.models) {
    try {
      models.push_back(parse_model(m));
    } catch (const Error& e) {
      errors.push_back("model '" + m + "': " + e.what());
    }
  }
  const std::set<std::string> tasks(c.tasks.begin(), c.tasks.end());
  for (const auto& t : c.tasks)
    if (!kTasks.count(t)) errors.push_back("unknown task '" + t + "'");
  if (tasks.size() != c.tasks.size()) errors.push_back("tasks must not repeat");
  if (!c.tasks.empty() && c.models.empty()) errors.push_back("models must not be empty when tasks are given");

  check_grid(c.n_grid, "n_grid", errors);
  for (double p : c.p_grid) {
    try {
      CostSpec{p}.validate();
    } catch (const Error& e) {
      errors.push_back(std::string("p_grid: ") + e.what());
    }
  }
  if (c.p_grid.empty() && (tasks.count("cost") || tasks.count("dyadic") || tasks.count("threshold")))
    errors.push_back("p_grid must not be empty for cost, dyadic or threshold tasks");
  if ((tasks.count("dyadic") || tasks.count("threshold")) &&
      std::any_of(c.p_grid.begin(), c.p_grid.end(), [](double p) { return p >= 1.0; }))
    errors.push_back("dyadic and threshold tasks need every p in (0, 1)");
  try {
    cells_per_unit(c.delta);
  } catch (const Error& e) {
    errors.push_back(std::string("delta: ") + e.what());
  }
  const std::size_t min_reps = (tasks.count("variance") || tasks.count("absdev") || tasks.count("threshold")) ? 100 : 2;
  if (c.replicas < min_reps) errors.push_back("replicas must be at least " + std::to_string(min_reps));
  if (c.threads < 0) errors.push_back("threads must be nonnegative (0 uses every core)");
  if (c.K < 1 || c.K > 16) errors.push_back("K must lie in [1, 16]");
  if (c.N < 2) errors.push_back("N must be at least 2");
  check_grid(c.t_grid, "t_grid", errors);
  if (tasks.count("shiftcoupling")) {
    for (double t : c.t_grid)
      if (t > static_cast<double>(c.N) / 2.0) {
        errors.push_back("t_grid entries must not exceed N/2");
        break;
      }
    if (c.t_grid.size() < 3) errors.push_back("shiftcoupling needs at least three t_grid points");
  }
  if (tasks.count("threshold") && c.n_grid.size() < 3) errors.push_back("threshold needs at least three n_grid points");
  if (c.output_dir.empty()) errors.push_back("output_dir must not be empty");

  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto name = to_string(models[i]);
    for (const auto& t : c.tasks) {
      if (!kTasks.count(t)) continue;
      if (interval_task(t) && !supports_interval(models[i]))
        errors.push_back("model " + name + " is sampled on a torus only and cannot run the interval task '" + t + "'");
      if (t == "shiftcoupling" && !(std::holds_alternative<Poisson>(models[i]) ||
                                    std::holds_alternative<PerturbedLattice>(models[i]) ||
                                    std::holds_alternative<CircularBeta>(models[i])))
        errors.push_back("model " + name + " has no torus surrogate for the task 'shiftcoupling'");
    }
  }
  if (errors.empty()) {
    c.models.clear();
    for (const auto& m : models) c.models.push_back(to_string(m));
    check.normalized = normalized_json(c);
    check.config = std::move(c);
  }
  return check;
}

ConfigCheck validate_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    ConfigCheck check;
    check.errors.push_back(e.what());
    return check;
  }
  return validate_config_text(text);
}

CampaignResult run_campaign(const CampaignConfig& c) {
  CampaignResult result;
  result.directory = c.output_dir;
  std::filesystem::create_directories(result.directory);
  EstimatorOptions est;
  est.threads = c.threads;
  est.delta = c.delta;

  auto emit = [&](TaskOutcome& out, const std::string& name, const std::string& content) {
    write_text_file(result.directory / name, content);
    out.files.push_back(name);
  };
  auto emit_curve = [&](TaskOutcome& out, const std::string& base, const CostCurve& curve, const std::string& ylabel,
                        bool logy) {
    emit(out, base + ".csv", curve_csv(curve));
    emit(out, base + ".json", curve_json(curve));
    emit(out, base + ".gp", gnuplot_script(base + ".csv", base, "n", ylabel, 1, 2, 3, true, logy));
  };

  for (const auto& task : c.tasks) {
    for (const auto& spec : c.models) {
      TaskOutcome out;
      out.task = task;
      out.model = spec;
      const auto model = parse_model(spec);
      const std::string base = task + "_" + slug(spec);
      try {
        if (task == "variance") {
          emit_curve(out, base, variance_curve(model, c.n_grid, c.replicas, c.seed, est), "Var(count)", true);
        } else if (task == "absdev") {
          emit_curve(out, base, central_moment_curve(model, c.n_grid, c.replicas, c.seed, est), "E|n - count|", true);
        } else if (task == "cost") {
          for (double p : c.p_grid)
            emit_curve(out, base + "_" + p_tag(p), cost_curve(model, p, c.n_grid, c.replicas, c.seed, est),
                       "cost / n", true);
        } else if (task == "dyadic") {
          for (double p : c.p_grid) {
            const auto s = dyadic_experiment(model, c.K, p, c.replicas, c.seed, c.delta, c.threads);
            const auto name = base + "_" + p_tag(p);
            emit(out, name + ".csv", dyadic_csv(s));
            emit(out, name + ".json", dyadic_json(s));
            emit(out, name + ".gp", gnuplot_script(name + ".csv", name, "level k", "mean cbar", 1, 2, 3, false, false));
          }
        } else if (task == "threshold") {
          ThresholdOptions opt;
          opt.estimator = est;
          opt.slope_tolerance = c.slope_tolerance;
          const auto rep = threshold_estimate(model, c.p_grid, c.n_grid, c.replicas, c.seed, opt);
          emit(out, base + ".json", scaling_json(rep));
          emit(out, base + "_variance.csv", curve_csv(rep.variance));
          emit(out, base + "_variance.gp",
               gnuplot_script(base + "_variance.csv", base, "n", "Var(count)", 1, 2, 3, true, true));
        } else if (task == "shiftcoupling") {
          const auto rep = shift_coupling_check(model, c.N, c.t_grid, c.replicas, c.seed, 1.0, c.delta, c.threads);
          const auto wit = theorem_p1_witness(model, c.t_grid, std::max<std::size_t>(c.replicas, 100), c.seed, c.threads);
          emit(out, base + ".csv", shift_csv(rep));
          emit(out, base + ".json", shift_json(rep, &wit));
          emit(out, base + ".gp", gnuplot_script(base + ".csv", base, "t", "margin", 1, 6, 0, true, false));
        }
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        result.exit_code = 2;
      }
      result.tasks.push_back(std::move(out));
    }
  }

  const auto normalized = normalized_json(c);
  json manifest;
  manifest["version"] = version();
  manifest["config_hash"] = fnv1a_hex(normalized);
  manifest["config"] = json::parse(normalized);
  manifest["seed"] = c.seed;
  json tasks = json::array();
  for (const auto& t : result.tasks) {
    json e{{"task", t.task}, {"model", t.model}, {"ok", t.ok}, {"files", t.files}};
    if (!t.ok) e["error"] = t.error;
    tasks.push_back(std::move(e));
  }
  manifest["tasks"] = std::move(tasks);
  write_text_file(result.directory / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace otlab
