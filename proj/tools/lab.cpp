// lab: command line front end of the otlab library.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "otlab/campaign.hpp"
#include "otlab/dyadic.hpp"
#include "otlab/error.hpp"
#include "otlab/estimators.hpp"
#include "otlab/io.hpp"
#include "otlab/samplers.hpp"
#include "otlab/torus.hpp"
#include "otlab/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailed = 2;

std::string sidecar(const std::string& out) { return out + ".json"; }

int cmd_sample(const std::string& model_spec, double n, std::size_t replicas, std::uint64_t seed,
               const std::string& out, bool torus) {
  const auto model = otlab::parse_model(model_spec);
  const bool use_torus = torus || !otlab::supports_interval(model);
  const auto window = use_torus ? otlab::WindowSpec::torus(n) : otlab::WindowSpec::interval(n);
  std::vector<otlab::PointConfiguration> configs;
  json counts = json::array();
  for (std::size_t r = 0; r < replicas; ++r) {
    configs.push_back(otlab::sample(model, window, {seed, r}));
    counts.push_back(configs.back().size());
  }
  otlab::write_text_file(out, otlab::samples_csv(configs));
  json meta{{"model", otlab::to_string(model)},
            {"window_length", n},
            {"topology", use_torus ? "torus" : "interval"},
            {"seed", seed},
            {"replicas", replicas},
            {"counts", counts},
            {"version", otlab::version()}};
  otlab::write_text_file(sidecar(out), meta.dump(2) + "\n");
  return kOk;
}

int cmd_transport(const std::string& points_csv, double p, double delta, const std::string& out, double n,
                  double padding, double variance) {
  auto points = otlab::read_points_csv(points_csv);
  std::sort(points.begin(), points.end());
  if (!(n > 0.0)) {
    const fs::path meta_path = sidecar(points_csv);
    if (fs::exists(meta_path)) {
      n = json::parse(otlab::read_text_file(meta_path)).at("window_length").get<double>();
    } else {
      n = points.empty() ? 1.0 : std::floor(points.back()) + 1.0;
    }
  }
  const double L0 = padding > 0.0 ? padding : otlab::default_padding(n);
  const auto plan = otlab::adaptive_padding(points, n, otlab::CostSpec{p}, delta, L0);
  otlab::write_text_file(out, otlab::plan_json(plan, variance >= 0.0 ? variance : n));
  std::cout << "cost " << otlab::format_number(plan.total_cost) << " (l = " << otlab::format_number(plan.l)
            << ", r = " << otlab::format_number(plan.r) << ")\n";
  return kOk;
}

int cmd_dyadic(const std::string& model_spec, int K, double p, std::size_t replicas, std::uint64_t seed, double delta,
               int threads, const std::string& out) {
  const auto s = otlab::dyadic_experiment(otlab::parse_model(model_spec), K, p, replicas, seed, delta, threads);
  otlab::write_text_file(out, otlab::dyadic_csv(s));
  otlab::write_text_file(sidecar(out), otlab::dyadic_json(s));
  return kOk;
}

int cmd_curve(const std::string& stat, const std::string& model_spec, const std::vector<double>& n_grid, double p,
              std::size_t replicas, std::uint64_t seed, double delta, int threads, const std::string& out) {
  const auto model = otlab::parse_model(model_spec);
  otlab::EstimatorOptions opt;
  opt.threads = threads;
  opt.delta = delta;
  otlab::CostCurve curve;
  if (stat == "variance") curve = otlab::variance_curve(model, n_grid, replicas, seed, opt);
  else if (stat == "absdev") curve = otlab::central_moment_curve(model, n_grid, replicas, seed, opt);
  else curve = otlab::cost_curve(model, p, n_grid, replicas, seed, opt);
  otlab::write_text_file(out, otlab::curve_csv(curve));
  otlab::write_text_file(sidecar(out), otlab::curve_json(curve));
  const auto name = fs::path(out).filename().string();
  otlab::write_text_file(out + ".gp", otlab::gnuplot_script(name, stat, "n", stat, 1, 2, 3, true, true));
  return kOk;
}

int cmd_threshold(const std::string& model_spec, const std::vector<double>& p_grid, const std::vector<double>& n_grid,
                  std::size_t replicas, std::size_t variance_replicas, std::uint64_t seed, double delta,
                  double tolerance, bool cost_route, int threads, const std::string& out) {
  otlab::ThresholdOptions opt;
  opt.estimator.threads = threads;
  opt.estimator.delta = delta;
  opt.slope_tolerance = tolerance;
  opt.cost_route = cost_route;
  opt.variance_replicas = variance_replicas;
  const auto rep = otlab::threshold_estimate(otlab::parse_model(model_spec), p_grid, n_grid, replicas, seed, opt);
  otlab::write_text_file(out, otlab::scaling_json(rep));
  std::cout << "variance route p* = " << otlab::format_number(rep.variance_p_star)
            << ", cost route p* = " << otlab::format_number(rep.cost_p_star) << "\n";
  return kOk;
}

int cmd_shift(const std::string& model_spec, std::size_t N, const std::vector<double>& t_grid, std::size_t replicas,
              std::uint64_t seed, double delta, int threads, const std::string& out) {
  const auto model = otlab::parse_model(model_spec);
  const auto rep = otlab::shift_coupling_check(model, N, t_grid, replicas, seed, 1.0, delta, threads);
  const auto wit = otlab::theorem_p1_witness(model, t_grid, std::max<std::size_t>(replicas, 100), seed, threads);
  otlab::write_text_file(out, otlab::shift_csv(rep));
  otlab::write_text_file(sidecar(out), otlab::shift_json(rep, &wit));
  std::cout << "inequality " << (rep.holds ? "holds" : "violated") << "; witness "
            << (wit.divergent ? "divergent" : "not divergent") << "\n";
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto check = otlab::validate_config(path);
  if (!check.errors.empty()) {
    for (const auto& e : check.errors) std::cerr << "error: " << e << "\n";
    return kInvalid;
  }
  std::cout << check.normalized;
  return kOk;
}

int cmd_run(const std::string& path) {
  const auto check = otlab::validate_config(path);
  if (!check.errors.empty()) {
    for (const auto& e : check.errors) std::cerr << "error: " << e << "\n";
    return kInvalid;
  }
  auto config = *check.config;
  if (const char* dir = std::getenv("OTLAB_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
  const auto result = otlab::run_campaign(config);
  for (const auto& t : result.tasks) {
    std::cout << (t.ok ? "ok     " : "FAILED ") << t.task << " " << t.model;
    if (!t.ok) std::cout << ": " << t.error;
    std::cout << "\n";
  }
  std::cout << "outputs in " << result.directory.string() << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"otlab: transport cost thresholds for one-dimensional point processes"};
  app.set_version_flag("--version", std::string(otlab::version()));
  app.require_subcommand(1);

  std::string model = "poisson", out, points, config, stat = "variance";
  double n = 256, p = 0.5, delta = 1.0 / 64.0, padding = 0.0, variance = -1.0, tolerance = 0.05;
  std::size_t replicas = 100, N = 512, variance_replicas = 0;
  std::uint64_t seed = 0;
  int K = 8, threads = 0;
  bool torus = false, no_cost = false;
  std::vector<double> n_grid{16, 32, 64, 128, 256}, p_grid{0.3, 0.7}, t_grid{8, 16, 32, 64, 128};

  auto* sample = app.add_subcommand("sample", "sample point configurations to CSV");
  sample->add_option("--model", model, "model spec, e.g. poisson or lattice:sigma=0.5")->required();
  sample->add_option("--n", n, "window length")->required();
  sample->add_option("--replicas", replicas)->required();
  sample->add_option("--seed", seed)->required();
  sample->add_option("--out", out, "CSV path (replica,point)")->required();
  sample->add_flag("--torus", torus, "sample on a torus of circumference n");

  auto* transport = app.add_subcommand("transport", "optimal semicoupling of sampled points");
  transport->add_option("--points", points, "CSV of points")->required()->check(CLI::ExistingFile);
  transport->add_option("--p", p)->required();
  transport->add_option("--delta", delta, "cell width (1/delta integer)");
  transport->add_option("--out", out, "plan JSON path")->required();
  transport->add_option("--n", n, "window length (default: from the sample sidecar)")->default_val(0);
  transport->add_option("--padding", padding, "initial padding (default 4 sqrt(n) + 8)");
  transport->add_option("--variance", variance, "count variance for boundary diagnostics (default n)");

  auto* dyadic = app.add_subcommand("dyadic", "dyadic coupling ledger");
  dyadic->add_option("--model", model)->required();
  dyadic->add_option("--K", K)->required();
  dyadic->add_option("--p", p)->required();
  dyadic->add_option("--replicas", replicas)->required();
  dyadic->add_option("--seed", seed)->required();
  dyadic->add_option("--out", out)->required();
  dyadic->add_option("--delta", delta);
  dyadic->add_option("--threads", threads);

  auto* curve = app.add_subcommand("curve", "variance, absolute deviation or cost curve");
  curve->add_option("--stat", stat)->required()->check(CLI::IsMember({"variance", "absdev", "cost"}));
  curve->add_option("--model", model)->required();
  curve->add_option("--n-grid", n_grid)->delimiter(',');
  curve->add_option("--p", p, "cost exponent (cost only)");
  curve->add_option("--replicas", replicas)->required();
  curve->add_option("--seed", seed)->required();
  curve->add_option("--out", out)->required();
  curve->add_option("--delta", delta);
  curve->add_option("--threads", threads);

  auto* threshold = app.add_subcommand("threshold", "estimate p* by the variance and cost routes");
  threshold->add_option("--model", model)->required();
  threshold->add_option("--p-grid", p_grid)->delimiter(',');
  threshold->add_option("--n-grid", n_grid)->delimiter(',');
  threshold->add_option("--replicas", replicas)->required();
  threshold->add_option("--variance-replicas", variance_replicas);
  threshold->add_option("--seed", seed)->required();
  threshold->add_option("--out", out, "ScalingReport JSON path")->required();
  threshold->add_option("--delta", delta);
  threshold->add_option("--slope-tolerance", tolerance);
  threshold->add_flag("--no-cost-route", no_cost);
  threshold->add_option("--threads", threads);

  auto* shift = app.add_subcommand("shiftcoupling", "shift-coupling inequality on the torus");
  shift->add_option("--model", model)->required();
  shift->add_option("--N", N)->required();
  shift->add_option("--tgrid", t_grid)->delimiter(',');
  shift->add_option("--replicas", replicas)->required();
  shift->add_option("--seed", seed)->required();
  shift->add_option("--out", out)->required();
  shift->add_option("--delta", delta);
  shift->add_option("--threads", threads);

  auto* run = app.add_subcommand("run", "run a campaign config");
  run->add_option("--config", config)->required();
  auto* validate = app.add_subcommand("validate", "validate a campaign config");
  validate->add_option("--config", config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*sample) return cmd_sample(model, n, replicas, seed, out, torus);
    if (*transport) return cmd_transport(points, p, delta, out, n, padding, variance);
    if (*dyadic) return cmd_dyadic(model, K, p, replicas, seed, delta, threads, out);
    if (*curve) return cmd_curve(stat, model, n_grid, p, replicas, seed, delta, threads, out);
    if (*threshold)
      return cmd_threshold(model, p_grid, n_grid, replicas, variance_replicas, seed, delta, tolerance, !no_cost,
                           threads, out);
    if (*shift) return cmd_shift(model, N, t_grid, replicas, seed, delta, threads, out);
    if (*run) return cmd_run(config);
    if (*validate) return cmd_validate(config);
  } catch (const otlab::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
