#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "otlab/dyadic.hpp"
#include "otlab/estimators.hpp"
#include "otlab/point_configuration.hpp"
#include "otlab/torus.hpp"
#include "otlab/transport.hpp"

namespace otlab {

/// Shortest decimal form that reads back to the same double ("%.17g" trimmed
/// to the first round-tripping precision); "nan" and "inf" for non-finite.
std::string format_number(double x);

/// Writes bytes exactly (LF line endings), creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// replica,point
std::string samples_csv(std::span<const PointConfiguration> configs);
/// n,mean,se,R
std::string curve_csv(const CostCurve& curve);
/// level,mean_cbar,se_cbar,mean_increment,bound_term
std::string dyadic_csv(const DyadicSummary& summary);
/// t,lhs_mean,lhs_se,rhs_mean,rhs_se,margin
std::string shift_csv(const ShiftCouplingReport& report);

/// {cost, l, r, a, b, assignments: [{cell, atom, mass}], params}; a and b
/// come from boundary_diagnostics with the given variance estimate.
std::string plan_json(const SemicouplingPlan& plan, double variance);
std::string curve_json(const CostCurve& curve);
std::string scaling_json(const ScalingReport& report);
std::string dyadic_json(const DyadicSummary& summary);
std::string shift_json(const ShiftCouplingReport& report, const WitnessReport* witness);

/// Points from a CSV: either "replica,point" (rows of the first replica are
/// used) or one number per line, with an optional header.
std::vector<double> read_points_csv(const std::filesystem::path& path);

/// Plot script for a CSV with columns x,y[,err] readable by gnuplot.
std::string gnuplot_script(const std::string& csv_name, const std::string& title, const std::string& xlabel,
                           const std::string& ylabel, int x_column, int y_column, int err_column, bool logx,
                           bool logy);

/// FNV-1a 64-bit hash rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace otlab
