#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace otlab {

/// Library version string.
const char* version();

/// Campaign description. JSON keys are the member names; everything except
/// `seed` has a default:
///   models ["poisson"], n_grid [16, 32, 64, 128, 256], p_grid [0.3],
///   replicas 200, delta 1/64, output_dir "results", tasks [], threads 0,
///   K 8, N 512, t_grid [8, 16, 32, 64, 128], slope_tolerance 0.05.
/// Tasks: variance, absdev, cost, dyadic, threshold, shiftcoupling.
struct CampaignConfig {
  std::vector<std::string> models{"poisson"};
  std::vector<double> n_grid{16, 32, 64, 128, 256};
  std::vector<double> p_grid{0.3};
  std::size_t replicas = 200;
  std::uint64_t seed = 0;
  double delta = 1.0 / 64.0;
  std::string output_dir = "results";
  std::vector<std::string> tasks;
  int threads = 0;
  int K = 8;
  std::size_t N = 512;
  std::vector<double> t_grid{8, 16, 32, 64, 128};
  double slope_tolerance = 0.05;
};

struct ConfigCheck {
  std::optional<CampaignConfig> config;
  /// Every problem found, in document order.
  std::vector<std::string> errors;
  /// Normalized config (defaults filled) as pretty JSON, when valid.
  std::string normalized;
};

ConfigCheck validate_config_text(const std::string& json_text);
ConfigCheck validate_config(const std::filesystem::path& path);

std::string normalized_json(const CampaignConfig& config);

struct TaskOutcome {
  std::string task;
  std::string model;
  bool ok = true;
  std::string error;
  std::vector<std::string> files;
};

struct CampaignResult {
  std::filesystem::path directory;
  std::vector<TaskOutcome> tasks;
  /// 0 when every task succeeded, 2 otherwise.
  int exit_code = 0;
};

/// Runs every (task, model) pair and writes CSV/JSON/plot files plus
/// manifest.json into `config.output_dir`. Outputs depend only on the config.
CampaignResult run_campaign(const CampaignConfig& config);

}  // namespace otlab
