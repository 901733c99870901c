#pragma once

// Report serialization: "kerf-report/1" JSON, RFC 4180 CSV and a
// colour-coded SVG view of the path.

#include <array>
#include <string>

#include <nlohmann/json.hpp>

#include "kerf/analyzer.hpp"

namespace kerf {

inline constexpr const char* kReportSchema = "kerf-report/1";

nlohmann::ordered_json report_to_json(const Report& report);
// Throws Error on a document that is not a kerf-report/1 report.
Report report_from_json(const nlohmann::json& j);

// Deterministic text: fixed field order, numbers rounded to 6 decimals.
std::string emit_json(const Report& report);

// Blocks table, a blank line, then the junctions table. CRLF line endings.
std::string emit_csv(const Report& report);
std::string emit_csv_blocks(const Report& report);
std::string emit_csv_junctions(const Report& report);

enum class SvgView { NcuCapacity, Discontinuity };

struct SvgStyle {
  SvgView view = SvgView::Discontinuity;
  Plane projection = Plane::XY;
  // Indexed by SeverityClass / LengthClass.
  std::array<std::string, 4> severity_colours{"#2e9e44", "#e6c200", "#f07f16", "#d62728"};
  std::array<std::string, 3> length_colours{"#d62728", "#f07f16", "#2e9e44"};
  std::string neutral_colour = "#5a5a5a";
  std::string rapid_colour = "#9db4d0";
  // Relative to the larger extent of the drawing.
  double stroke_width = 0.003;
  double marker_radius = 0.008;
  double padding = 0.05;
};

// Throws Error when the report does not describe the given path.
std::string emit_svg(const Report& report, const ToolPath& path, const SvgStyle& style = {});

}  // namespace kerf
