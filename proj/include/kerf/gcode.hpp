#pragma once

// Parser for the 3-axis G-code subset the analyzer consumes:
//   N, G0 G1 G2 G3, G17 G18 G19, G21, G90, X Y Z, I J K, R, F,
//   comments in parentheses or after ';'.
// Absolute millimetre programs only. S/T/M words carry no geometry and are
// skipped with a warning; any other word rejects its line.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kerf/geometry.hpp"

namespace kerf {

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  int line = 0;
  Severity severity = Severity::Error;
  std::string message;
  std::string text;  // offending source text
};

struct ParseResult {
  ToolPath path;
  std::vector<ParseDiagnostic> diagnostics;

  bool has_errors() const;
  std::size_t error_count() const;
};

ParseResult parse_program(std::string_view text, Point3 start = {});

// Incremental centre offsets from the start point (I, J, K).
struct CenterOffsets {
  Vec3 ijk;
};
// Signed radius: positive selects the arc of at most half a turn.
struct SignedRadius {
  double r = 0.0;
};
using ArcDesignation = std::variant<CenterOffsets, SignedRadius>;

// Throws ArcError when the designation cannot describe an arc between the
// two points.
Point3 resolve_arc_center(Point3 start, Point3 end, const ArcDesignation& designation, Plane plane,
                          bool clockwise);

// Canonical program text: a "G21 G90" header, then one block per line with
// every coordinate written out to 6 decimals and feeds in mm/min.
std::string emit_gcode(const ToolPath& path);

}  // namespace kerf
