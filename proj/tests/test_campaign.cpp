#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "otlab/campaign.hpp"
#include "otlab/error.hpp"
#include "otlab/io.hpp"

using namespace otlab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("otlab_campaign_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CampaignConfig parse_ok(const std::string& text) {
  const auto check = validate_config_text(text);
  EXPECT_TRUE(check.errors.empty()) << (check.errors.empty() ? "" : check.errors.front());
  return check.config.value();
}

bool any_error_contains(const ConfigCheck& c, const std::string& needle) {
  for (const auto& e : c.errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

int run_lab(const std::string& args) {
  const std::string cmd = std::string("\"") + OTLAB_LAB_BINARY + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Campaign, EmptyTaskListWritesOnlyTheManifest) {
  const auto dir = scratch("empty");
  auto c = parse_ok(R"({"seed": 3})");
  c.output_dir = (dir / "out").string();
  const auto res = run_campaign(c);
  EXPECT_EQ(res.exit_code, 0);
  EXPECT_TRUE(res.tasks.empty());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "out")) files.push_back(e.path().filename());
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0], "manifest.json");
  const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 3);
  EXPECT_TRUE(manifest["tasks"].empty());
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
}

TEST(Campaign, RerunsAreByteIdentical) {
  const auto dir = scratch("rerun");
  const std::string text = R"({"seed": 5, "models": ["poisson", "lattice:sigma=0.5"], "tasks": ["variance", "absdev", "cost"],
    "n_grid": [4, 8, 16], "p_grid": [0.5], "replicas": 100, "delta": 0.25})";
  auto a = parse_ok(text);
  a.output_dir = (dir / "a").string();
  auto b = a;
  b.output_dir = (dir / "b").string();
  b.threads = 1;
  ASSERT_EQ(run_campaign(a).exit_code, 0);
  ASSERT_EQ(run_campaign(b).exit_code, 0);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    const auto name = e.path().filename();
    if (name.extension() != ".csv") continue;
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / name)) << name;
    ++compared;
  }
  EXPECT_EQ(compared, 6u);
}

TEST(Campaign, ManifestTracesEveryOutput) {
  const auto dir = scratch("manifest");
  auto c = parse_ok(R"({"seed": 8, "tasks": ["variance"], "n_grid": [4, 8], "replicas": 100})");
  c.output_dir = dir.string();
  run_campaign(c);
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  ASSERT_EQ(manifest["tasks"].size(), 1u);
  const auto& t = manifest["tasks"][0];
  EXPECT_EQ(t["task"], "variance");
  EXPECT_EQ(t["model"], "poisson");
  for (const auto& f : t["files"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>())) << f;
  const auto csv = t["files"][0].get<std::string>();
  EXPECT_EQ(slurp(dir / csv).substr(0, 12), "n,mean,se,R\n");
}

TEST(Campaign, PartialFailureIsRecordedPerTask) {
  const auto dir = scratch("partial");
  auto c = parse_ok(R"({"seed": 8, "models": ["poisson", "lattice:sigma=0.5"], "tasks": ["variance"], "n_grid": [4, 8],
    "replicas": 100})");
  c.output_dir = dir.string();
  // Learn the file names, then block one of them with a directory.
  run_campaign(c);
  const auto first = json::parse(slurp(dir / "manifest.json"));
  const auto blocked = first["tasks"][0]["files"][0].get<std::string>();
  fs::remove(dir / blocked);
  fs::create_directories(dir / blocked / "x");
  const auto res = run_campaign(c);
  EXPECT_EQ(res.exit_code, 2);
  ASSERT_EQ(res.tasks.size(), 2u);
  EXPECT_FALSE(res.tasks[0].ok);
  EXPECT_FALSE(res.tasks[0].error.empty());
  EXPECT_TRUE(res.tasks[1].ok);
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["tasks"][0]["ok"], false);
  EXPECT_TRUE(manifest["tasks"][0].contains("error"));
}

TEST(ConfigValidation, MinimalConfigGetsDefaults) {
  const auto check = validate_config_text(R"({"seed": 1, "tasks": ["variance"]})");
  ASSERT_TRUE(check.errors.empty());
  const auto n = json::parse(check.normalized);
  EXPECT_EQ(n["models"], json::array({"poisson"}));
  EXPECT_EQ(n["n_grid"], json::array({16, 32, 64, 128, 256}));
  EXPECT_EQ(n["p_grid"], json::array({0.3}));
  EXPECT_EQ(n["replicas"], 200);
  EXPECT_EQ(n["delta"], 1.0 / 64.0);
  EXPECT_EQ(n["output_dir"], "results");
  EXPECT_EQ(n["threads"], 0);
  EXPECT_EQ(n["K"], 8);
  EXPECT_EQ(n["N"], 512);
  EXPECT_EQ(n["t_grid"], json::array({8, 16, 32, 64, 128}));
  EXPECT_EQ(n["slope_tolerance"], 0.05);
  // Normalizing is idempotent.
  EXPECT_EQ(validate_config_text(check.normalized).normalized, check.normalized);
}

TEST(ConfigValidation, ExponentOutsideRangeCitesIt) {
  const auto check = validate_config_text(R"({"seed": 1, "p_grid": [1.5], "tasks": ["cost"]})");
  EXPECT_FALSE(check.config);
  EXPECT_TRUE(any_error_contains(check, "(0, 1]"));
}

TEST(ConfigValidation, SeedIsRequired) {
  const auto check = validate_config_text(R"({"tasks": ["variance"]})");
  EXPECT_TRUE(any_error_contains(check, "seed required"));
}

TEST(ConfigValidation, TorusModelOnIntervalTask) {
  const auto check = validate_config_text(R"({"seed": 1, "models": ["cbeta:beta=2"], "tasks": ["variance"]})");
  EXPECT_TRUE(any_error_contains(check, "torus"));
  EXPECT_TRUE(any_error_contains(check, "variance"));
  EXPECT_TRUE(validate_config_text(R"({"seed": 1, "models": ["cbeta:beta=2"], "tasks": ["shiftcoupling"]})").errors.empty());
}

TEST(ConfigValidation, ReportsEveryErrorAtOnce) {
  const auto check = validate_config_text(R"({"colour": 1, "tasks": ["variance", "fly"], "replicas": 5})");
  EXPECT_TRUE(any_error_contains(check, "unknown key 'colour'"));
  EXPECT_TRUE(any_error_contains(check, "unknown task 'fly'"));
  EXPECT_TRUE(any_error_contains(check, "seed required"));
  EXPECT_TRUE(any_error_contains(check, "replicas"));
  EXPECT_GE(check.errors.size(), 4u);
}

TEST(ConfigValidation, RejectsMalformedJson) {
  EXPECT_FALSE(validate_config_text("{seed: 1").errors.empty());
  EXPECT_FALSE(validate_config_text("[1, 2]").errors.empty());
  EXPECT_FALSE(validate_config("/nonexistent/config.json").errors.empty());
}

TEST(Io, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(16), "16");
  EXPECT_EQ(format_number(0.1), "0.1");
  for (double x : {1.0 / 3.0, 12.77123456789, 1e-300, -2.5e17}) EXPECT_EQ(std::strtod(format_number(x).c_str(), nullptr), x);
}

TEST(Io, ReadPointsCsv) {
  const auto dir = scratch("points");
  write_text_file(dir / "a.csv", "replica,point\n0,0.5\n0,1.25\n1,7\n");
  EXPECT_EQ(read_points_csv(dir / "a.csv"), (std::vector<double>{0.5, 1.25}));
  write_text_file(dir / "b.csv", "x\n3\n1.5\n");
  const auto b = read_points_csv(dir / "b.csv");
  ASSERT_EQ(b.size(), 2u);
  write_text_file(dir / "c.csv", "0.5\nbanana\n");
  EXPECT_THROW(read_points_csv(dir / "c.csv"), Error);
}

TEST(LabCli, ExitCodes) {
  const auto dir = scratch("cli");
  write_text_file(dir / "good.json", R"({"seed": 2, "tasks": ["variance"], "n_grid": [4, 8], "replicas": 100, "output_dir": ")" +
                                         (dir / "out").string() + "\"}");
  write_text_file(dir / "bad.json", R"({"seed": 2, "p_grid": [1.5]})");
  fs::create_directories(dir / "blocked");
  write_text_file(dir / "blocked" / "file", "");
  write_text_file(dir / "fails.json",
                  R"({"seed": 2, "tasks": ["variance"], "n_grid": [4, 8], "replicas": 100, "output_dir": ")" +
                      (dir / "blocked" / "file").string() + "\"}");
  EXPECT_EQ(run_lab("validate --config " + (dir / "good.json").string()), 0);
  EXPECT_EQ(run_lab("validate --config " + (dir / "bad.json").string()), 1);
  EXPECT_EQ(run_lab("run --config " + (dir / "bad.json").string()), 1);
  EXPECT_EQ(run_lab("run --config " + (dir / "good.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
  EXPECT_EQ(run_lab("run --config " + (dir / "fails.json").string()), 2);
  EXPECT_EQ(run_lab("sample --model poisson --n 8 --seed 1"), 1);
  EXPECT_EQ(run_lab("transport --p 0.5"), 1);
  EXPECT_EQ(run_lab("nosuchcommand"), 1);
}

TEST(LabCli, SampleAndTransportRoundTrip) {
  const auto dir = scratch("roundtrip");
  const auto pts = (dir / "pts.csv").string();
  ASSERT_EQ(run_lab("sample --model poisson --n 16 --replicas 2 --seed 4 --out " + pts), 0);
  const auto side = json::parse(slurp(pts + ".json"));
  EXPECT_EQ(side["window_length"], 16);
  EXPECT_EQ(side["seed"], 4);
  const auto plan = (dir / "plan.json").string();
  ASSERT_EQ(run_lab("transport --points " + pts + " --p 0.5 --delta 0.25 --out " + plan), 0);
  const auto j = json::parse(slurp(plan));
  EXPECT_GT(j["cost"].get<double>(), 0.0);
  EXPECT_EQ(run_lab("transport --points " + pts + " --p 1.5 --out " + plan), 1);
}

TEST(LabCli, OutputDirectoryOverride) {
  const auto dir = scratch("env");
  write_text_file(dir / "c.json", R"({"seed": 2, "output_dir": "ignored"})");
  const std::string cmd = "OTLAB_OUTPUT_DIR=\"" + (dir / "env_out").string() + "\" \"" + OTLAB_LAB_BINARY +
                          "\" run --config " + (dir / "c.json").string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "env_out" / "manifest.json"));
}
