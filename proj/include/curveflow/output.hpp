#pragma once

// CSV and SVG emission for simulation runs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "curveflow/errors.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/time_stepper.hpp"

namespace curveflow {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

inline void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace detail

inline void write_series_csv(std::span<const SnapshotRecord> records, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "t,i,x1,x2,r,k,nu,alpha\n";
  for (const auto& rec : records) {
    const std::string t = format_number(rec.summary.t);
    for (std::size_t i = 0; i < rec.x1.size(); ++i) {
      out << t << ',' << i << ',' << format_number(rec.x1[i]) << ',' << format_number(rec.x2[i]) << ','
          << format_number(rec.r[i]) << ',' << format_number(rec.k[i]) << ',' << format_number(rec.nu[i]) << ','
          << format_number(rec.alpha[i]) << '\n';
    }
  }
  detail::check_written(out, path);
}

inline void write_summary_csv(std::span<const StepSummary> rows, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "t,L,A,mean_k_beta,omega,max_rphi_dev\n";
  for (const auto& s : rows)
    out << format_number(s.t) << ',' << format_number(s.L) << ',' << format_number(s.A) << ','
        << format_number(s.mean_k_beta) << ',' << format_number(s.omega) << ',' << format_number(s.max_rphi_dev)
        << '\n';
  detail::check_written(out, path);
}

inline void write_curve_csv(std::span<const Vec2> vertices, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "i,x1,x2\n";
  for (std::size_t i = 0; i < vertices.size(); ++i)
    out << i << ',' << format_number(vertices[i].x) << ',' << format_number(vertices[i].y) << '\n';
  detail::check_written(out, path);
}

/// series.csv, summary.csv and (after a shrink-to-point stop) final_rescaled.csv.
inline void write_snapshots(const RunResult& run, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  write_series_csv(run.snapshots, dir / "series.csv");
  write_summary_csv(run.summary, dir / "summary.csv");
  if (run.final_rescaled) write_curve_csv(*run.final_rescaled, dir / "final_rescaled.csv");
}

/// Parses series.csv back into records, grouping rows by their t column.
inline std::vector<SnapshotRecord> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "t,i,x1,x2,r,k,nu,alpha") throw ParseError(path.string() + ": bad header");

  std::vector<SnapshotRecord> out;
  std::size_t lineno = 1;
  std::string prev_t;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) throw ParseError(path.string() + ": line " + std::to_string(lineno) + ": expected 8 fields");
    double v[8];
    try {
      for (int j = 0; j < 8; ++j) v[j] = std::stod(cells[j]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": line " + std::to_string(lineno) + ": not a number");
    }
    if (out.empty() || cells[0] != prev_t || v[1] == 0.0) {
      out.emplace_back();
      out.back().summary.t = v[0];
      prev_t = cells[0];
    }
    auto& rec = out.back();
    rec.x1.push_back(v[2]);
    rec.x2.push_back(v[3]);
    rec.r.push_back(v[4]);
    rec.k.push_back(v[5]);
    rec.nu.push_back(v[6]);
    rec.alpha.push_back(v[7]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG

struct SvgStyle {
  double width = 600.0;
  double margin = 20.0;
  double point_radius = 1.2;
  double stroke_width = 0.8;
  int polyline_every = 3;  // every third frame gets an outline
  std::string point_color = "#1f4e9c";
  std::string line_color = "#222222";
};

struct BoundingBox {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
};

namespace detail {

class SvgCanvas {
 public:
  SvgCanvas(BoundingBox box, const SvgStyle& style) : style_(style) {
    // A degenerate cloud still gets a unit-sized window around it.
    double w = box.xmax - box.xmin;
    double h = box.ymax - box.ymin;
    const double extent = std::max({w, h, 0.0});
    const double floor = extent > 0.0 ? extent * 1e-3 : 1.0;
    if (!(w > floor)) { const double c = 0.5 * (box.xmin + box.xmax); box.xmin = c - floor / 2; box.xmax = c + floor / 2; w = floor; }
    if (!(h > floor)) { const double c = 0.5 * (box.ymin + box.ymax); box.ymin = c - floor / 2; box.ymax = c + floor / 2; h = floor; }
    box_ = box;
    scale_ = (style.width - 2.0 * style.margin) / std::max(w, h);
    height_ = h * scale_ + 2.0 * style.margin;
    width_ = w * scale_ + 2.0 * style.margin;
  }

  double sx(double x) const { return style_.margin + (x - box_.xmin) * scale_; }
  double sy(double y) const { return height_ - style_.margin - (y - box_.ymin) * scale_; }

  void polygon(std::span<const double> x, std::span<const double> y) {
    body_ << "<polygon fill=\"none\" stroke=\"" << style_.line_color << "\" stroke-width=\"" << style_.stroke_width
          << "\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) body_ << (i ? " " : "") << sx(x[i]) << ',' << sy(y[i]);
    body_ << "\"/>\n";
  }

  void points(std::span<const double> x, std::span<const double> y) {
    body_ << "<g fill=\"" << style_.point_color << "\">\n";
    for (std::size_t i = 0; i < x.size(); ++i)
      body_ << "<circle cx=\"" << sx(x[i]) << "\" cy=\"" << sy(y[i]) << "\" r=\"" << style_.point_radius << "\"/>\n";
    body_ << "</g>\n";
  }

  void save(const std::filesystem::path& path) const {
    auto out = open_for_write(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
        << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    check_written(out, path);
  }

 private:
  SvgStyle style_;
  BoundingBox box_;
  double scale_ = 1.0;
  double width_ = 0.0;
  double height_ = 0.0;
  std::ostringstream body_;
};

}  // namespace detail

struct SvgFrameCounts {
  std::size_t point_frames = 0;
  std::size_t polyline_frames = 0;
  BoundingBox box;
};

/// Overlays all frames in one picture: markers on every frame, an outline on
/// every `polyline_every`-th frame and on the last one.
inline SvgFrameCounts render_svg(std::span<const SnapshotRecord> frames, const std::filesystem::path& path,
                                 const SvgStyle& style = {}) {
  if (frames.empty()) throw IoError("render_svg needs at least one frame");
  SvgFrameCounts counts;
  for (const auto& f : frames)
    for (std::size_t i = 0; i < f.x1.size(); ++i) counts.box.add(f.x1[i], f.x2[i]);
  detail::SvgCanvas canvas(counts.box, style);
  const int every = std::max(1, style.polyline_every);
  for (std::size_t j = 0; j < frames.size(); ++j) {
    if (j % static_cast<std::size_t>(every) == 0 || j + 1 == frames.size()) {
      canvas.polygon(frames[j].x1, frames[j].x2);
      ++counts.polyline_frames;
    }
    canvas.points(frames[j].x1, frames[j].x2);
    ++counts.point_frames;
  }
  canvas.save(path);
  return counts;
}

inline void render_curve_svg(std::span<const Vec2> vertices, const std::filesystem::path& path,
                             const SvgStyle& style = {}) {
  if (vertices.empty()) throw IoError("render_curve_svg needs at least one vertex");
  std::vector<double> x(vertices.size()), y(vertices.size());
  BoundingBox box;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    x[i] = vertices[i].x;
    y[i] = vertices[i].y;
    box.add(x[i], y[i]);
  }
  detail::SvgCanvas canvas(box, style);
  canvas.polygon(x, y);
  canvas.points(x, y);
  canvas.save(path);
}

/// evolution.svg from about 100 thinned frames, plus final_rescaled.svg.
inline void write_svgs(const RunResult& run, const std::filesystem::path& dir, const SvgStyle& style = {}) {
  detail::ensure_dir(dir);
  if (!run.snapshots.empty()) render_svg(thin_snapshots(run.snapshots), dir / "evolution.svg", style);
  if (run.final_rescaled) render_curve_svg(*run.final_rescaled, dir / "final_rescaled.svg", style);
}

}  // namespace curveflow
