#include "otlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "otlab/error.hpp"

namespace otlab {
namespace {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json curve_body(const CostCurve& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["model"] = c.model;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  if (c.kind == CurveKind::cost) {
    j["p"] = c.p;
    j["delta"] = c.delta;
  }
  j["n"] = c.n;
  json mean = json::array(), se = json::array();
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    mean.push_back(number(c.mean[i]));
    se.push_back(number(c.se[i]));
  }
  j["mean"] = mean;
  j["se"] = se;
  return j;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\r' || *end == '\t') ++end;
  return *end == '\0';
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string samples_csv(std::span<const PointConfiguration> configs) {
  std::string out = "replica,point\n";
  for (std::size_t r = 0; r < configs.size(); ++r)
    for (double x : configs[r].points) out += std::to_string(r) + "," + format_number(x) + "\n";
  return out;
}

std::string curve_csv(const CostCurve& curve) {
  std::string out = "n,mean,se,R\n";
  for (std::size_t i = 0; i < curve.n.size(); ++i)
    out += format_number(curve.n[i]) + "," + format_number(curve.mean[i]) + "," + format_number(curve.se[i]) + "," +
           std::to_string(curve.replicas) + "\n";
  return out;
}

std::string dyadic_csv(const DyadicSummary& s) {
  std::string out = "level,mean_cbar,se_cbar,mean_increment,bound_term\n";
  for (const auto& r : s.rows)
    out += std::to_string(r.k) + "," + format_number(r.mean_cbar) + "," + format_number(r.se_cbar) + "," +
           format_number(r.mean_increment) + "," + format_number(r.bound_term) + "\n";
  return out;
}

std::string shift_csv(const ShiftCouplingReport& rep) {
  std::string out = "t,lhs_mean,lhs_se,rhs_mean,rhs_se,margin\n";
  for (const auto& r : rep.rows)
    out += format_number(r.t) + "," + format_number(r.lhs_mean) + "," + format_number(r.lhs_se) + "," +
           format_number(r.rhs_mean) + "," + format_number(r.rhs_se) + "," + format_number(r.margin) + "\n";
  return out;
}

std::string plan_json(const SemicouplingPlan& plan, double variance) {
  const auto d = boundary_diagnostics(plan, variance);
  json j;
  j["cost"] = plan.total_cost;
  j["l"] = plan.l;
  j["r"] = plan.r;
  j["a"] = d.a;
  j["b"] = d.b;
  json as = json::array();
  for (const auto& a : plan.assignments) as.push_back({{"cell", a.cell}, {"atom", a.atom}, {"mass", a.mass}});
  j["assignments"] = std::move(as);
  j["params"] = {{"p", plan.cost.p},
                 {"delta", plan.grid.delta},
                 {"padding", plan.padding},
                 {"window_length", plan.window_length},
                 {"atoms", plan.atoms.size()},
                 {"grid_origin", plan.grid.origin},
                 {"cells", plan.grid.cells},
                 {"doublings", plan.doublings},
                 {"padding_certified", plan.padding_certified},
                 {"variance", variance},
                 {"kappa", d.kappa},
                 {"overhang_property", d.overhang_property}};
  return j.dump(2) + "\n";
}

std::string curve_json(const CostCurve& curve) { return curve_body(curve).dump(2) + "\n"; }

std::string scaling_json(const ScalingReport& rep) {
  json j;
  j["model"] = rep.model;
  j["seed"] = rep.seed;
  j["replicas"] = rep.replicas;
  j["delta"] = rep.delta;
  j["variance"] = curve_body(rep.variance);
  const auto& g = rep.growth;
  j["growth"] = {{"gamma", g.gamma},
                 {"gamma_ci", {g.gamma_lo, g.gamma_hi}},
                 {"log_coef", g.log_coef},
                 {"log_coef_ci", {g.log_lo, g.log_hi}},
                 {"rss_power", number(g.rss_power)},
                 {"rss_log", number(g.rss_log)},
                 {"preferred", g.preferred == GrowthModel::power ? "power" : "log"},
                 {"p_star", g.p_star}};
  j["variance_p_star"] = rep.variance_p_star;
  json cost = json::array();
  for (std::size_t i = 0; i < rep.cost_classes.size(); ++i) {
    const auto& c = rep.cost_classes[i];
    json e = curve_body(rep.cost_curves[i]);
    e["slope"] = c.slope;
    e["slope_ci"] = {c.slope_lo, c.slope_hi};
    e["growing"] = c.growing;
    cost.push_back(std::move(e));
  }
  j["cost_route"] = std::move(cost);
  j["slope_tolerance"] = rep.slope_tolerance;
  j["cost_p_star"] = number(rep.cost_p_star);
  j["routes_agree"] = rep.routes_agree;
  json clt = json::array();
  for (const auto& c : rep.clt)
    clt.push_back({{"n", c.n}, {"ks", c.ks}, {"pvalue", c.pvalue}, {"consistent", c.consistent}});
  j["clt"] = std::move(clt);
  auto rows = [](const std::vector<RatioRow>& v) {
    json a = json::array();
    for (const auto& r : v) a.push_back({{"n", r.n}, {"a_n", r.a_n}, {"ratio", r.ratio}});
    return a;
  };
  j["regular_variance"] = {{"power_sequence", rows(rep.regular_variance.power_sequence)},
                           {"log_sequence", rows(rep.regular_variance.log_sequence)},
                           {"regular", rep.regular_variance.regular()}};
  j["justification"] = rep.justification;
  return j.dump(2) + "\n";
}

std::string dyadic_json(const DyadicSummary& s) {
  json j;
  j["model"] = s.model;
  j["seed"] = s.seed;
  j["replicas"] = s.replicas;
  j["K"] = s.K;
  j["p"] = s.p;
  j["delta"] = s.delta;
  j["telescoping_error"] = s.telescoping_error;
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"level", r.k},
                    {"mean_cbar", r.mean_cbar},
                    {"se_cbar", r.se_cbar},
                    {"mean_increment", number(r.mean_increment)},
                    {"se_increment", number(r.se_increment)},
                    {"var_z", r.var_z},
                    {"bound_term", r.bound_term}});
  j["levels"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string shift_json(const ShiftCouplingReport& rep, const WitnessReport* witness) {
  json j;
  j["model"] = rep.model;
  j["N"] = rep.N;
  j["replicas"] = rep.replicas;
  j["seed"] = rep.seed;
  j["p"] = rep.p;
  j["holds"] = rep.holds;
  j["mean_displacement"] = rep.mean_displacement;
  j["mean_displacement_se"] = rep.mean_displacement_se;
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"t", r.t}, {"margin", r.margin}, {"margin_se", r.margin_se}});
  j["margins"] = std::move(rows);
  if (witness) {
    j["witness"] = {{"t", witness->absdev.n},
                    {"lower_bound", witness->lower_bound},
                    {"lower_bound_se", witness->lower_bound_se},
                    {"slope", witness->slope},
                    {"slope_ci", {witness->slope_lo, witness->slope_hi}},
                    {"divergent", witness->divergent}};
  }
  return j.dump(2) + "\n";
}

std::vector<double> read_points_csv(const std::filesystem::path& path) {
  std::istringstream is(read_text_file(path));
  std::string line;
  std::vector<double> pts;
  int point_col = 0, replica_col = -1;
  bool first = true;
  std::string first_replica;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (first) {
      first = false;
      double probe;
      if (!parse_double(cells[0], probe)) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (cells[c] == "point") point_col = static_cast<int>(c);
          if (cells[c] == "replica") replica_col = static_cast<int>(c);
        }
        continue;
      }
    }
    if (static_cast<int>(cells.size()) <= std::max(point_col, replica_col))
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": missing column");
    if (replica_col >= 0) {
      if (first_replica.empty()) first_replica = cells[replica_col];
      if (cells[replica_col] != first_replica) continue;
    }
    double x;
    if (!parse_double(cells[point_col], x))
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": not a number: " + cells[point_col]);
    pts.push_back(x);
  }
  return pts;
}

std::string gnuplot_script(const std::string& csv_name, const std::string& title, const std::string& xlabel,
                           const std::string& ylabel, int x_column, int y_column, int err_column, bool logx,
                           bool logy) {
  std::ostringstream os;
  os << "# gnuplot script\n"
     << "set datafile separator ','\n"
     << "set key off\n"
     << "set title '" << title << "'\n"
     << "set xlabel '" << xlabel << "'\n"
     << "set ylabel '" << ylabel << "'\n";
  if (logx) os << "set logscale x 2\n";
  if (logy) os << "set logscale y\n";
  os << "plot '" << csv_name << "' every ::1 using " << x_column << ":" << y_column;
  if (err_column > 0) os << ":" << err_column << " with yerrorlines";
  else os << " with linespoints";
  os << "\n";
  return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace otlab
