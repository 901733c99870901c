#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kerf/emitters.hpp"

namespace kerf {

namespace {

std::string field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += field(cells[i]);
  }
  out += "\r\n";
}

}  // namespace

std::string emit_csv_blocks(const Report& report) {
  std::string out;
  row(out, {"index", "source_line", "kind", "rapid", "length_mm", "programmed_feed_mm_s",
            "min_length_mm", "feed_cap_mm_s", "reduction_pct", "length_class"});
  for (const BlockAnalysis& b : report.blocks)
    row(out, {std::to_string(b.index), std::to_string(b.source_line), b.arc ? "arc" : "linear",
              b.rapid ? "true" : "false", number(b.length), number(b.programmed_feed),
              number(b.min_length), number(b.feed_cap), number(b.reduction_pct),
              std::string(length_class_name(b.length_class))});
  return out;
}

std::string emit_csv_junctions(const Report& report) {
  std::string out;
  row(out, {"index", "source_line", "type", "x_mm", "y_mm", "z_mm", "beta_rad", "r_before_mm",
            "r_after_mm", "programmed_feed_mm_s", "predicted_feed_mm_s", "reduction_pct",
            "severity", "binding"});
  for (const JunctionAnalysis& j : report.junctions) {
    const bool tangential = j.type == JunctionType::Tangential;
    row(out, {std::to_string(j.index), std::to_string(j.source_line),
              std::string(junction_type_name(j.type)), number(j.location.x), number(j.location.y),
              number(j.location.z), tangential ? number(j.beta) : "",
              tangential ? "" : number(j.r_before), tangential ? "" : number(j.r_after),
              number(j.programmed_feed), number(j.predicted_feed), number(j.reduction_pct),
              std::string(severity_name(j.severity)), std::string(binding_name(j.binding))});
  }
  return out;
}

std::string emit_csv(const Report& report) {
  return emit_csv_blocks(report) + "\r\n" + emit_csv_junctions(report);
}

}  // namespace kerf
