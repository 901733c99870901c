#include <doctest.h>

#include <cmath>
#include <random>
#include <regex>
#include <string>

#include <nlohmann/json.hpp>

#include "kerf/analyzer.hpp"
#include "kerf/emitters.hpp"
#include "kerf/errors.hpp"
#include "kerf/gcode.hpp"
#include "support/scenarios.hpp"

using namespace kerf;

namespace {

ToolPath parse_ok(const std::string& text) {
  const ParseResult r = parse_program(text);
  REQUIRE_FALSE(r.has_errors());
  return r.path;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<std::string> split_crlf(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find("\r\n", start)) != std::string::npos; start = pos + 2)
    out.push_back(s.substr(start, pos - start));
  return out;
}

bool close6(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("JSON for a report without junctions") {
  const ToolPath p = parse_ok("G1 X10 F600\n");
  const Report r = analyze(p, testing::illustrative_machine());
  const nlohmann::json j = nlohmann::json::parse(emit_json(r));
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["junctions"].is_array());
  CHECK(j["junctions"].empty());
  CHECK(j["notes"].empty());
  for (const auto& [k, v] : j["summary"]["severity"].items()) CHECK(v == 0);
  CHECK(j["summary"]["tangential"] == 0);
  CHECK(j["summary"]["curvature"] == 0);
  CHECK(j["blocks"].size() == 1);
  CHECK(j["toolpath"]["total_length_mm"] == 10.0);
}

TEST_CASE("JSON for the hexagon") {
  const ToolPath p = parse_ok(testing::hexagon_program(10000));
  const Report r = analyze(p, testing::illustrative_machine());
  const nlohmann::json j = nlohmann::json::parse(emit_json(r));
  REQUIRE(j["junctions"].size() == 6);
  for (const auto& rec : j["junctions"]) {
    CHECK(rec["severity"] == j["junctions"][0]["severity"]);
    CHECK(rec["type"] == "tangential");
    CHECK(rec["corner"].is_object());
    CHECK(rec["r_before_mm"].is_null());
  }
  CHECK(j["machine"]["axes"]["x"]["vmax_mm_min"] == 30000.0);
}

TEST_CASE("JSON is deterministic and round-trips") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 10; ++k) {
    const ParseResult p = parse_program(testing::random_program(rng, 60));
    if (p.path.blocks.empty()) continue;
    const Report r = analyze(p.path, testing::illustrative_machine());
    const std::string text = emit_json(r);
    CHECK(text == emit_json(analyze(p.path, testing::illustrative_machine())));

    const Report back = report_from_json(nlohmann::json::parse(text));
    CHECK(emit_json(back) == text);
    REQUIRE(back.blocks.size() == r.blocks.size());
    REQUIRE(back.junctions.size() == r.junctions.size());
    CHECK(back.histograms == r.histograms);
    CHECK(back.notes == r.notes);
    CHECK(back.bins == r.bins);
    for (std::size_t i = 0; i < r.blocks.size(); ++i) {
      CHECK(back.blocks[i].length_class == r.blocks[i].length_class);
      CHECK(close6(back.blocks[i].feed_cap, r.blocks[i].feed_cap));
      CHECK(close6(back.blocks[i].length, r.blocks[i].length));
    }
    for (std::size_t i = 0; i < r.junctions.size(); ++i) {
      const JunctionAnalysis& a = r.junctions[i];
      const JunctionAnalysis& b = back.junctions[i];
      CHECK(a.type == b.type);
      CHECK(a.severity == b.severity);
      CHECK(a.binding == b.binding);
      CHECK(close6(b.predicted_feed, a.predicted_feed));
      CHECK(close6(b.r_before, a.r_before));
      CHECK(a.corner.has_value() == b.corner.has_value());
    }
  }
}

TEST_CASE("report_from_json rejects other documents") {
  CHECK_THROWS_AS(report_from_json(nlohmann::json::parse(R"({"schema":"other/2"})")), Error);
  CHECK_THROWS_AS(report_from_json(nlohmann::json::parse("[1,2]")), Error);
}

TEST_CASE("CSV for an empty report is headers only") {
  const std::string csv = emit_csv(Report{});
  const auto lines = split_crlf(csv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].rfind("index,source_line,kind,", 0) == 0);
  CHECK(lines[1].empty());
  CHECK(lines[2].rfind("index,source_line,type,", 0) == 0);
}

TEST_CASE("CSV row for a 95% reduction") {
  Report r;
  JunctionAnalysis j;
  j.index = 3;
  j.source_line = 12;
  j.type = JunctionType::Tangential;
  j.beta = 1.0;
  j.programmed_feed = 100;
  j.predicted_feed = 5;
  j.reduction_pct = 95;
  j.severity = classify_severity(95);
  r.junctions.push_back(j);
  JunctionAnalysis c = j;
  c.type = JunctionType::CurvatureSegmentArc;
  c.r_after = 4.0;
  r.junctions.push_back(c);
  const auto lines = split_crlf(emit_csv_junctions(r));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].find(",Severe,") != std::string::npos);
  CHECK(lines[1].find("95.000000") != std::string::npos);
  // Radii belong to curvature rows, the turn angle to tangential ones.
  CHECK(lines[1].find(",1.000000,,,") != std::string::npos);
  CHECK(lines[2].find(",,inf,4.000000,") != std::string::npos);
}

TEST_CASE("CSV quoting") {
  Report r;
  r.notes.push_back("ignored");
  const std::string csv = emit_csv_blocks(r);
  CHECK(csv.find('\n') == csv.find("\r\n") + 1);
  // Every row of a real report has the header's column count.
  const Report h = analyze(parse_ok(testing::hexagon_program(10000)), testing::illustrative_machine());
  for (const std::string& line : split_crlf(emit_csv_junctions(h)))
    CHECK(count(line, ",") == 13);
  for (const std::string& line : split_crlf(emit_csv_blocks(h))) CHECK(count(line, ",") == 9);
}

TEST_CASE("SVG: staircase in the NCU view is all Critical") {
  const ToolPath p = parse_ok(testing::staircase_program(1.0, 12, 10000));
  const Report r = analyze(p, testing::illustrative_machine());
  SvgStyle style;
  style.view = SvgView::NcuCapacity;
  const std::string svg = emit_svg(r, p, style);
  CHECK(count(svg, "<path ") == 12);
  CHECK(count(svg, "length-Critical\"") == 12);
  CHECK(count(svg, "stroke=\"" + style.length_colours[0] + "\"") == 12);
}

TEST_CASE("SVG: collinear path has no markers, hexagon has six of one colour") {
  const ToolPath flat = parse_ok("G1 X1 F600\nX2\n");
  CHECK(count(emit_svg(analyze(flat, testing::illustrative_machine()), flat), "<circle") == 0);

  const ToolPath hex = parse_ok(testing::hexagon_program(10000));
  const Report r = analyze(hex, testing::illustrative_machine());
  const std::string svg = emit_svg(r, hex);
  CHECK(count(svg, "<circle") == 6);
  const std::string colour = SvgStyle{}.severity_colours[static_cast<std::size_t>(r.junctions[0].severity)];
  CHECK(count(svg, "<circle class=\"junction severity-" + std::string(severity_name(r.junctions[0].severity)) +
                       "\"") == 6);
  std::regex fill("<circle[^>]*fill=\"([^\"]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), fill); it != std::sregex_iterator(); ++it)
    CHECK((*it)[1] == colour);
}

TEST_CASE("SVG: arcs, degenerate bounds and mismatched input") {
  const ToolPath spiral = parse_ok(testing::spiral_program(6000));
  const Report r = analyze(spiral, testing::illustrative_machine());
  const std::string svg = emit_svg(r, spiral);
  CHECK(count(svg, " A") >= 4);
  CHECK(count(svg, "<path ") == spiral.blocks.size());

  // A vertical plunge seen from above collapses to a point.
  const ToolPath plunge = parse_ok("G1 Z-5 F100\n");
  const std::string dot = emit_svg(analyze(plunge, testing::illustrative_machine()), plunge);
  CHECK(dot.find("viewBox=\"-0.5 -0.5 1 1\"") != std::string::npos);

  ToolPath other = spiral;
  other.blocks.pop_back();
  CHECK_THROWS_AS(emit_svg(r, other), Error);
}

TEST_CASE("SVG projections") {
  const ToolPath p = parse_ok("G18 G2 X20 Z0 I10 K0 F600\n");
  const Report r = analyze(p, testing::illustrative_machine());
  for (Plane plane : {Plane::XY, Plane::XZ, Plane::YZ}) {
    SvgStyle s;
    s.projection = plane;
    const std::string svg = emit_svg(r, p, s);
    CHECK(count(svg, "<path ") == 1);
    CHECK(svg.find("</svg>") != std::string::npos);
  }
}
