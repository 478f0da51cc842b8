#include "fvpnet/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fvpnet/errors.hpp"

namespace fvpnet {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string trajectory_csv(const Trajectory& trajectory, bool include_states) {
  std::ostringstream out;
  out << kCsvVersionLine << '\n' << "t,alpha,e_t,r_t,f_mean,active_edges";
  const StackedState* shape = trajectory.states.empty() ? nullptr : &trajectory.states.front().x;
  const bool states = include_states && shape != nullptr;
  if (states)
    for (std::size_t i = 0; i < shape->agents(); ++i)
      for (std::size_t k = 0; k < shape->dim(); ++k) out << ",x" << i + 1 << '_' << k + 1;
  out << '\n';
  std::size_t snap = 0;
  for (const StepRecord& s : trajectory.steps) {
    out << s.t << ',' << format_number(s.alpha) << ',' << format_number(s.error) << ',' << format_number(s.residual)
        << ',' << format_number(s.f_mean) << ',' << s.active.to_hex();
    if (states) {
      while (snap < trajectory.states.size() && trajectory.states[snap].t < s.t) ++snap;
      const bool have = snap < trajectory.states.size() && trajectory.states[snap].t == s.t;
      for (std::size_t c = 0; c < shape->size(); ++c) {
        out << ',';
        if (have) out << format_number(trajectory.states[snap].x[c]);
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string metrics_csv(const Scenario& scenario, const Trajectory& trajectory) {
  std::ostringstream out;
  out << kCsvVersionLine << '\n' << "key,value\n";
  auto row = [&out](const std::string& key, const std::string& value) { out << key << ',' << value << '\n'; };
  const StepRecord& first = trajectory.steps.front();
  const StepRecord& last = trajectory.steps.back();
  row("agents", std::to_string(scenario.x0.agents()));
  row("dim", std::to_string(scenario.x0.dim()));
  row("horizon", std::to_string(scenario.algo.horizon));
  row("seed", std::to_string(scenario.algo.seed));
  row("eta", format_number(scenario.algo.eta));
  row("beta", format_number(scenario.algo.beta));
  row("zeta", scenario.algo.zeta ? format_number(*scenario.algo.zeta) : "none");
  row("weight", weight_model_name(scenario.weight));
  for (std::size_t k = 0; k < scenario.reference.size(); ++k)
    row("reference_" + std::to_string(k + 1), format_number(scenario.reference[k]));
  row("e_0", format_number(first.error));
  row("e_T", format_number(last.error));
  row("e_T_over_e_0", format_number(first.error > 0.0 ? last.error / first.error : 0.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < trajectory.terminal.agents(); ++i)
    worst = std::max(worst, distance(trajectory.terminal.block(i), scenario.reference));
  row("max_agent_distance_T", format_number(worst));
  const std::vector<double> mean = block_mean(trajectory.terminal);
  for (std::size_t k = 0; k < mean.size(); ++k) row("mean_x_T_" + std::to_string(k + 1), format_number(mean[k]));
  row("r_T", format_number(last.residual));
  return out.str();
}

std::string curve_csv(const MeanSquareCurve& curve) {
  std::ostringstream out;
  out << kCsvVersionLine << '\n' << "t,mean_square,half_width\n";
  for (std::size_t t = 0; t < curve.mean.size(); ++t)
    out << t << ',' << format_number(curve.mean[t]) << ',' << format_number(curve.half_width[t]) << '\n';
  return out.str();
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string reports_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  out << kCsvVersionLine << '\n' << "name,samples,violations,worst_margin,tolerance,passed,detail\n";
  for (const CheckReport& r : reports)
    out << r.name << ',' << r.samples << ',' << r.violations << ',' << format_number(r.worst_margin) << ','
        << format_number(r.tolerance) << ',' << (r.passed ? "true" : "false") << ',' << csv_quote(r.detail) << '\n';
  return out.str();
}

std::string reports_text(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  for (const CheckReport& r : reports) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.violations << '/' << r.samples
        << " violations, worst margin " << format_number(r.worst_margin);
    if (!r.detail.empty()) out << " (" << r.detail << ')';
    out << '\n';
  }
  return out.str();
}

std::string mixing_csv(const std::vector<std::pair<std::size_t, MixingMatrix>>& matrices) {
  std::ostringstream out;
  out << kCsvVersionLine << '\n' << "t,row";
  const std::size_t m = matrices.empty() ? 0 : matrices.front().second.size();
  for (std::size_t j = 0; j < m; ++j) out << ",w_" << j + 1;
  out << '\n';
  for (const auto& [t, w] : matrices)
    for (std::size_t i = 0; i < w.size(); ++i) {
      out << t << ',' << i + 1;
      for (std::size_t j = 0; j < w.size(); ++j) out << ',' << format_number(w(i, j));
      out << '\n';
    }
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV reading

std::ptrdiff_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : it - header.begin();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const char c = line[k];
      if (quoted) {
        if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
          cell.push_back('"');
          ++k;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(std::move(cell));
        cell.clear();
      } else {
        cell.push_back(c);
      }
    }
    cells.push_back(std::move(cell));
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    std::vector<double> values(cells.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::string& s = cells[k];
      if (s.empty()) continue;
      double v;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec == std::errc() && ptr == s.data() + s.size()) values[k] = v;
    }
    table.rows.push_back(std::move(values));
    table.raw.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 50.0;
constexpr std::size_t kMaxPoints = 2000;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                                "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Series {
  std::vector<double> xs, ys;
  std::string color;
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi == lo) lo -= 0.5, hi += 0.5;
  }
};

class Plot {
 public:
  Plot(std::string title, std::string xlabel, std::string ylabel, bool log_y = false)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), log_y_(log_y) {}

  void add(Series s) { series_.push_back(std::move(s)); }
  void marker(double x, double y, char glyph, std::string color) { markers_.push_back({x, y, glyph, std::move(color)}); }

  std::string render() {
    Range xr, yr;
    for (const Series& s : series_)
      for (std::size_t k = 0; k < s.xs.size(); ++k) {
        xr.add(s.xs[k]);
        yr.add(transform(s.ys[k]));
      }
    for (const Marker& m : markers_) {
      xr.add(m.x);
      yr.add(transform(m.y));
    }
    xr.settle();
    yr.settle();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title_ << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
      const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
      svg << "<text x=\"" << fmt2(px(fx)) << "\" y=\"" << fmt2(kHeight - kBottom + 16)
          << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
      svg << "<text x=\"" << fmt2(kLeft - 6) << "\" y=\"" << fmt2(py(fy) + 4) << "\" text-anchor=\"end\">"
          << tick_label(log_y_ ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">" << xlabel_
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << kTop + ph / 2 << ")\">" << ylabel_ << "</text>\n";
    for (const Series& s : series_) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      bool first = true;
      for (std::size_t k = 0; k < s.xs.size(); ++k) {
        const double y = transform(s.ys[k]);
        if (!std::isfinite(s.xs[k]) || !std::isfinite(y)) continue;
        if (!first) svg << ' ';
        svg << fmt2(px(s.xs[k])) << ',' << fmt2(py(y));
        first = false;
      }
      svg << "\"/>\n";
    }
    for (const Marker& m : markers_) {
      const double cx = px(m.x), cy = py(transform(m.y));
      if (m.glyph == 'o') {
        svg << "<circle cx=\"" << fmt2(cx) << "\" cy=\"" << fmt2(cy) << "\" r=\"4\" fill=\"none\" stroke=\""
            << m.color << "\"/>\n";
      } else {
        svg << "<path d=\"M" << fmt2(cx - 4) << ' ' << fmt2(cy - 4) << " L" << fmt2(cx + 4) << ' ' << fmt2(cy + 4)
            << " M" << fmt2(cx - 4) << ' ' << fmt2(cy + 4) << " L" << fmt2(cx + 4) << ' ' << fmt2(cy - 4)
            << "\" stroke=\"" << m.color << "\" stroke-width=\"1.5\"/>\n";
      }
    }
    svg << "</svg>\n";
    return svg.str();
  }

 private:
  struct Marker {
    double x, y;
    char glyph;
    std::string color;
  };

  double transform(double y) const {
    if (!log_y_) return y;
    return y > 0.0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN();
  }

  std::string title_, xlabel_, ylabel_;
  bool log_y_;
  std::vector<Series> series_;
  std::vector<Marker> markers_;
};

// row indices where column `col` is present, thinned to at most kMaxPoints
std::vector<std::size_t> present_rows(const CsvTable& table, std::size_t col) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (col < table.rows[r].size() && std::isfinite(table.rows[r][col])) rows.push_back(r);
  if (rows.size() <= kMaxPoints) return rows;
  std::vector<std::size_t> thinned;
  const double stride = static_cast<double>(rows.size() - 1) / static_cast<double>(kMaxPoints - 1);
  for (std::size_t k = 0; k < kMaxPoints; ++k)
    thinned.push_back(rows[static_cast<std::size_t>(std::llround(static_cast<double>(k) * stride))]);
  return thinned;
}

}  // namespace

std::vector<std::filesystem::path> render_trajectory_plots(const CsvTable& table, const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  const auto t_col = table.column("t");
  const auto e_col = table.column("e_t");
  if (t_col < 0 || e_col < 0) throw IoError("trajectory CSV needs t and e_t columns");
  const auto tc = static_cast<std::size_t>(t_col);

  {
    Plot plot("Error e_t = |x_t - s* (x) 1|", "t", "e_t (log scale)", true);
    Series s;
    s.color = kPalette[0];
    for (std::size_t r : present_rows(table, static_cast<std::size_t>(e_col))) {
      s.xs.push_back(table.rows[r][tc]);
      s.ys.push_back(table.rows[r][static_cast<std::size_t>(e_col)]);
    }
    plot.add(std::move(s));
    const auto path = out_dir / "error.svg";
    write_file_atomic(path, plot.render());
    written.push_back(path);
  }

  // state columns x{i}_{k}
  std::map<std::size_t, std::map<std::size_t, std::size_t>> cols;  // k -> i -> column
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& h = table.header[c];
    if (h.size() < 4 || h[0] != 'x') continue;
    const auto us = h.find('_');
    if (us == std::string::npos) continue;
    try {
      const std::size_t i = std::stoul(h.substr(1, us - 1));
      const std::size_t k = std::stoul(h.substr(us + 1));
      cols[k][i] = c;
    } catch (const std::exception&) {
    }
  }
  for (const auto& [k, agents] : cols) {
    Plot plot("Coordinate " + std::to_string(k) + " of every agent", "t", "x_i^" + std::to_string(k));
    std::size_t color = 0;
    for (const auto& [i, c] : agents) {
      Series s;
      s.color = kPalette[color++ % std::size(kPalette)];
      for (std::size_t r : present_rows(table, c)) {
        s.xs.push_back(table.rows[r][tc]);
        s.ys.push_back(table.rows[r][c]);
      }
      plot.add(std::move(s));
    }
    const auto path = out_dir / ("coord_" + std::to_string(k) + ".svg");
    write_file_atomic(path, plot.render());
    written.push_back(path);
  }
  if (cols.size() == 2 && cols.count(1) && cols.count(2)) {
    Plot plot("Agent paths (o: start, x: end)", "x^1", "x^2");
    std::size_t color = 0;
    for (const auto& [i, c1] : cols[1]) {
      const auto it = cols[2].find(i);
      if (it == cols[2].end()) continue;
      const std::size_t c2 = it->second;
      Series s;
      s.color = kPalette[color++ % std::size(kPalette)];
      for (std::size_t r : present_rows(table, c1)) {
        if (!std::isfinite(table.rows[r][c2])) continue;
        s.xs.push_back(table.rows[r][c1]);
        s.ys.push_back(table.rows[r][c2]);
      }
      if (!s.xs.empty()) {
        plot.marker(s.xs.front(), s.ys.front(), 'o', s.color);
        plot.marker(s.xs.back(), s.ys.back(), 'x', "black");
      }
      plot.add(std::move(s));
    }
    const auto path = out_dir / "path_2d.svg";
    write_file_atomic(path, plot.render());
    written.push_back(path);
  }
  return written;
}

std::filesystem::path render_curve_plot(const CsvTable& curve, const std::filesystem::path& out_dir) {
  const auto t_col = curve.column("t");
  const auto m_col = curve.column("mean_square");
  if (t_col < 0 || m_col < 0) throw IoError("curve CSV needs t and mean_square columns");
  Plot plot("Mean-square error E|x_t - x*|^2", "t", "mean square (log scale)", true);
  Series s;
  s.color = kPalette[3];
  for (std::size_t r : present_rows(curve, static_cast<std::size_t>(m_col))) {
    s.xs.push_back(curve.rows[r][static_cast<std::size_t>(t_col)]);
    s.ys.push_back(curve.rows[r][static_cast<std::size_t>(m_col)]);
  }
  plot.add(std::move(s));
  const auto path = out_dir / "mean_square.svg";
  write_file_atomic(path, plot.render());
  return path;
}

}  // namespace fvpnet
