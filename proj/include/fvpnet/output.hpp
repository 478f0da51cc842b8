#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fvpnet/algorithm.hpp"
#include "fvpnet/analysis.hpp"
#include "fvpnet/weights.hpp"

namespace fvpnet {

/// First line of every CSV this library writes.
inline constexpr const char* kCsvVersionLine = "# fvp-net-opt v1";

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Writes to `path` through a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// t,alpha,e_t,r_t,f_mean,active_edges[,x{i}_{k}...]. State cells are filled
/// on rows where a snapshot exists and left empty elsewhere.
std::string trajectory_csv(const Trajectory& trajectory, bool include_states);

/// key,value summary of a finished run.
std::string metrics_csv(const Scenario& scenario, const Trajectory& trajectory);

/// t,mean_square,half_width
std::string curve_csv(const MeanSquareCurve& curve);

/// name,samples,violations,worst_margin,tolerance,passed,detail
std::string reports_csv(const std::vector<CheckReport>& reports);
std::string reports_text(const std::vector<CheckReport>& reports);

/// t,row,w_1..w_m for each (t, matrix) pair.
std::string mixing_csv(const std::vector<std::pair<std::size_t, MixingMatrix>>& matrices);

/// Parsed CSV with '#' lines skipped; empty cells are NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::string>> raw;

  std::ptrdiff_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// SVG figures from a trajectory CSV: error.svg (log-scale e_t), and when
/// state columns exist coord_{k}.svg per coordinate and path_2d.svg for
/// two-dimensional states. Returns the files written.
std::vector<std::filesystem::path> render_trajectory_plots(const CsvTable& trajectory,
                                                           const std::filesystem::path& out_dir);

/// mean_square.svg from a curve CSV.
std::filesystem::path render_curve_plot(const CsvTable& curve, const std::filesystem::path& out_dir);

}  // namespace fvpnet
