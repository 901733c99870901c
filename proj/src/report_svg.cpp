#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "kerf/emitters.hpp"
#include "kerf/errors.hpp"

namespace kerf {

namespace {

constexpr int kArcBoundsSamples = 64;

struct Projection {
  Vec3 h;
  Vec3 v;

  explicit Projection(Plane plane) {
    switch (plane) {
      case Plane::XY: h = {1, 0, 0}; v = {0, 1, 0}; break;
      case Plane::XZ: h = {1, 0, 0}; v = {0, 0, 1}; break;
      case Plane::YZ: h = {0, 1, 0}; v = {0, 0, 1}; break;
    }
  }
  // SVG y grows downwards.
  double sx(Point3 p) const { return dot(p, h); }
  double sy(Point3 p) const { return -dot(p, v); }
  Vec3 view_normal() const { return cross(h, v); }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string point(const Projection& pr, Point3 p) { return fmt(pr.sx(p)) + " " + fmt(pr.sy(p)); }

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
};

std::string path_data(const Block& b, const Projection& pr) {
  std::string d = "M " + point(pr, b.start());
  if (!b.is_arc()) return d + " L " + point(pr, b.end());

  const ArcMove& a = b.arc();
  const double r = arc_radius(a);
  const double sweep_angle = swept_angle(a);
  const Vec3 travel = a.clockwise ? -plane_normal(a.plane) : plane_normal(a.plane);
  const double facing = dot(travel, pr.view_normal());

  if (std::abs(facing) < 0.5) {
    // Arc seen edge-on projects onto a segment; trace it through samples.
    for (int k = 1; k <= kArcBoundsSamples; ++k)
      d += " L " + point(pr, point_at(b, static_cast<double>(k) / kArcBoundsSamples));
    return d;
  }

  const std::string sweep = facing > 0 ? "0" : "1";
  const std::string radius = fmt(r) + " " + fmt(r) + " 0 ";
  if (sweep_angle >= 2.0 * std::numbers::pi - 1e-12) {
    d += " A " + radius + "0 " + sweep + " " + point(pr, point_at(b, 0.5));
    d += " A " + radius + "0 " + sweep + " " + point(pr, a.end);
    return d;
  }
  const std::string large = sweep_angle > std::numbers::pi ? "1" : "0";
  return d + " A " + radius + large + " " + sweep + " " + point(pr, a.end);
}

}  // namespace

std::string emit_svg(const Report& report, const ToolPath& path, const SvgStyle& style) {
  if (report.blocks.size() != path.blocks.size())
    throw Error("svg: report does not describe this path");
  const Projection pr(style.projection);

  Bounds bb;
  for (const Block& b : path.blocks) {
    if (b.is_arc()) {
      for (int k = 0; k <= kArcBoundsSamples; ++k) {
        const Point3 p = point_at(b, static_cast<double>(k) / kArcBoundsSamples);
        bb.add(pr.sx(p), pr.sy(p));
      }
    } else {
      bb.add(pr.sx(b.start()), pr.sy(b.start()));
      bb.add(pr.sx(b.end()), pr.sy(b.end()));
    }
  }

  double vx, vy, vw, vh;
  const double extent = std::max(bb.max_x - bb.min_x, bb.max_y - bb.min_y);
  if (!(extent > 1e-12)) {
    vx = bb.min_x - 0.5;
    vy = bb.min_y - 0.5;
    vw = vh = 1.0;
  } else {
    const double pad = style.padding * extent;
    vx = bb.min_x - pad;
    vy = bb.min_y - pad;
    vw = bb.max_x - bb.min_x + 2 * pad;
    vh = bb.max_y - bb.min_y + 2 * pad;
  }
  const double scale = std::max(vw, vh);
  const std::string stroke = fmt(style.stroke_width * scale);
  const std::string marker_r = fmt(style.marker_radius * scale);
  const bool ncu = style.view == SvgView::NcuCapacity;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + fmt(vx) + " " +
         fmt(vy) + " " + fmt(vw) + " " + fmt(vh) + "\">\n";
  out += std::string("<title>") + (ncu ? "NCU capacity" : "Discontinuity crossing") +
         " view</title>\n";

  out += "<g class=\"blocks\" fill=\"none\" stroke-linecap=\"round\" stroke-width=\"" + stroke +
         "\">\n";
  for (std::size_t i = 0; i < path.blocks.size(); ++i) {
    const Block& b = path.blocks[i];
    const BlockAnalysis& a = report.blocks[i];
    std::string colour = style.neutral_colour;
    std::string cls = "block";
    if (b.rapid) {
      colour = style.rapid_colour;
      cls += " rapid";
    } else if (ncu) {
      colour = style.length_colours[static_cast<std::size_t>(a.length_class)];
    }
    cls += " length-" + std::string(length_class_name(a.length_class));
    out += "<path class=\"" + cls + "\" data-index=\"" + std::to_string(i) + "\" data-line=\"" +
           std::to_string(b.source_line) + "\" stroke=\"" + colour + "\"";
    if (b.rapid) out += " stroke-dasharray=\"" + fmt(4 * style.stroke_width * scale) + "\"";
    out += " d=\"" + path_data(b, pr) + "\"/>\n";
  }
  out += "</g>\n";

  out += "<g class=\"junctions\" stroke=\"none\">\n";
  for (const JunctionAnalysis& j : report.junctions) {
    const std::string severity(severity_name(j.severity));
    out += "<circle class=\"junction severity-" + severity + "\" data-index=\"" +
           std::to_string(j.index) + "\" cx=\"" + fmt(pr.sx(j.location)) + "\" cy=\"" +
           fmt(pr.sy(j.location)) + "\" r=\"" + marker_r + "\" fill=\"" +
           style.severity_colours[static_cast<std::size_t>(j.severity)] + "\"><title>" +
           std::string(junction_type_name(j.type)) + " line " + std::to_string(j.source_line) +
           ": " + fmt(j.predicted_feed) + " mm/s (-" + fmt(j.reduction_pct) + "%)</title></circle>\n";
  }
  out += "</g>\n";

  // Legend swatches are rects so element counts of paths/circles stay one per record.
  const double cell = 0.03 * scale;
  out += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"" + fmt(0.8 * cell) + "\">\n";
  auto swatch = [&](int row, const std::string& colour, const std::string& label) {
    const double y = vy + (row + 0.5) * cell;
    out += "<rect x=\"" + fmt(vx + 0.5 * cell) + "\" y=\"" + fmt(y) + "\" width=\"" +
           fmt(0.8 * cell) + "\" height=\"" + fmt(0.8 * cell) + "\" fill=\"" + colour + "\"/>";
    out += "<text x=\"" + fmt(vx + 1.6 * cell) + "\" y=\"" + fmt(y + 0.7 * cell) + "\">" + label +
           "</text>\n";
  };
  if (ncu) {
    for (auto c : {LengthClass::Critical, LengthClass::Marginal, LengthClass::Ok})
      swatch(static_cast<int>(c), style.length_colours[static_cast<std::size_t>(c)],
             std::string(length_class_name(c)) + " (" +
                 std::to_string(report.histograms.length_class[static_cast<std::size_t>(c)]) + ")");
  } else {
    for (auto s : {SeverityClass::None, SeverityClass::Moderate, SeverityClass::High,
                   SeverityClass::Severe})
      swatch(static_cast<int>(s), style.severity_colours[static_cast<std::size_t>(s)],
             std::string(severity_name(s)) + " (" +
                 std::to_string(report.histograms.severity[static_cast<std::size_t>(s)]) + ")");
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace kerf
