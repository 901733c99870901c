#include <cmath>
#include <limits>

#include "kerf/emitters.hpp"
#include "kerf/errors.hpp"
#include "kerf/machine_config.hpp"

namespace kerf {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Six decimals; infinities become null.
ojson num(double v) {
  if (!std::isfinite(v)) return nullptr;
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

double num_or_inf(const json& j, const char* key) {
  const json& v = j.at(key);
  return v.is_null() ? kInf : v.get<double>();
}

template <typename E, typename F>
E enum_field(const json& j, const char* key, F from_name) {
  const std::string s = j.at(key).get<std::string>();
  const auto e = from_name(s);
  if (!e) throw Error(std::string("report: unknown ") + key + " '" + s + "'");
  return *e;
}

std::optional<Binding> binding_from_name(std::string_view s) {
  for (auto b : {Binding::Vmax, Binding::Acceleration, Binding::Jerk, Binding::BlockLength})
    if (binding_name(b) == s) return b;
  return std::nullopt;
}

ojson corner_to_json(const CornerModel1Result& c) {
  ojson j;
  j["radius_mm"] = num(c.radius);
  j["acceleration_mm_s2"] = num(c.acceleration);
  j["jerk_mm_s3"] = num(c.jerk);
  j["vmax_t_mm_s"] = num(c.vmax_t);
  j["v_fa_mm_s"] = num(c.v_fa);
  j["v_fjerk_mm_s"] = num(c.v_fjerk);
  j["v_limit_mm_s"] = num(c.v_limit);
  j["binding"] = binding_name(c.binding);
  return j;
}

CornerModel1Result corner_from_json(const json& j) {
  CornerModel1Result c;
  c.radius = j.at("radius_mm").get<double>();
  c.acceleration = num_or_inf(j, "acceleration_mm_s2");
  c.jerk = num_or_inf(j, "jerk_mm_s3");
  c.vmax_t = num_or_inf(j, "vmax_t_mm_s");
  c.v_fa = j.at("v_fa_mm_s").get<double>();
  c.v_fjerk = j.at("v_fjerk_mm_s").get<double>();
  c.v_limit = j.at("v_limit_mm_s").get<double>();
  c.binding = enum_field<Binding>(j, "binding", binding_from_name);
  return c;
}

}  // namespace

nlohmann::ordered_json report_to_json(const Report& r) {
  ojson j;
  j["schema"] = kReportSchema;

  ojson& tp = j["toolpath"];
  tp["block_count"] = r.block_count;
  tp["total_length_mm"] = num(r.total_length);
  tp["cutting_length_mm"] = num(r.cutting_length);
  tp["programmed_time_s"] = num(r.programmed_time);
  j["estimated_time_s"] = num(r.estimated_time);

  ojson machine = machine_to_json(r.machine);
  for (auto& [name, axis] : machine["axes"].items())
    for (auto& [key, value] : axis.items()) value = num(value.get<double>());
  for (const char* key : {"tit_mm", "t_int_s", "delta_t_s"}) machine[key] = num(machine[key].get<double>());
  j["machine"] = machine;

  j["severity_bins_pct"] = ojson::array();
  for (double e : r.bins.edges) j["severity_bins_pct"].push_back(num(e));

  ojson& summary = j["summary"];
  for (auto s : {SeverityClass::None, SeverityClass::Moderate, SeverityClass::High,
                 SeverityClass::Severe})
    summary["severity"][std::string(severity_name(s))] =
        r.histograms.severity[static_cast<std::size_t>(s)];
  for (auto c : {LengthClass::Critical, LengthClass::Marginal, LengthClass::Ok})
    summary["length_class"][std::string(length_class_name(c))] =
        r.histograms.length_class[static_cast<std::size_t>(c)];
  summary["tangential"] = r.histograms.tangential;
  summary["curvature"] = r.histograms.curvature;

  ojson blocks = ojson::array();
  for (const BlockAnalysis& b : r.blocks) {
    ojson e;
    e["index"] = b.index;
    e["source_line"] = b.source_line;
    e["kind"] = b.arc ? "arc" : "linear";
    e["rapid"] = b.rapid;
    e["length_mm"] = num(b.length);
    e["programmed_feed_mm_s"] = num(b.programmed_feed);
    e["min_length_mm"] = num(b.min_length);
    e["feed_cap_mm_s"] = num(b.feed_cap);
    e["reduction_pct"] = num(b.reduction_pct);
    e["length_class"] = length_class_name(b.length_class);
    blocks.push_back(std::move(e));
  }
  j["blocks"] = std::move(blocks);

  ojson junctions = ojson::array();
  for (const JunctionAnalysis& x : r.junctions) {
    ojson e;
    e["index"] = x.index;
    e["source_line"] = x.source_line;
    e["type"] = junction_type_name(x.type);
    e["location_mm"] = {num(x.location.x), num(x.location.y), num(x.location.z)};
    e["beta_rad"] = x.type == JunctionType::Tangential ? num(x.beta) : ojson(nullptr);
    e["r_before_mm"] = num(x.r_before);
    e["r_after_mm"] = num(x.r_after);
    e["opposite_turning"] = x.opposite_turning;
    e["programmed_feed_mm_s"] = num(x.programmed_feed);
    e["predicted_feed_mm_s"] = num(x.predicted_feed);
    e["reduction_pct"] = num(x.reduction_pct);
    e["severity"] = severity_name(x.severity);
    e["binding"] = binding_name(x.binding);
    e["corner"] = x.corner ? corner_to_json(*x.corner) : ojson(nullptr);
    junctions.push_back(std::move(e));
  }
  j["junctions"] = std::move(junctions);

  j["notes"] = r.notes;
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kReportSchema)
      throw Error("report: unsupported schema");
    Report r;
    const json& tp = j.at("toolpath");
    r.block_count = tp.at("block_count").get<std::size_t>();
    r.total_length = tp.at("total_length_mm").get<double>();
    r.cutting_length = tp.at("cutting_length_mm").get<double>();
    r.programmed_time = tp.at("programmed_time_s").get<double>();
    r.estimated_time = j.at("estimated_time_s").get<double>();
    r.machine = machine_from_json(j.at("machine"));
    const json& bins = j.at("severity_bins_pct");
    for (std::size_t i = 0; i < 3; ++i) r.bins.edges[i] = bins.at(i).get<double>();

    const json& summary = j.at("summary");
    for (auto s : {SeverityClass::None, SeverityClass::Moderate, SeverityClass::High,
                   SeverityClass::Severe})
      r.histograms.severity[static_cast<std::size_t>(s)] =
          summary.at("severity").at(std::string(severity_name(s))).get<std::size_t>();
    for (auto c : {LengthClass::Critical, LengthClass::Marginal, LengthClass::Ok})
      r.histograms.length_class[static_cast<std::size_t>(c)] =
          summary.at("length_class").at(std::string(length_class_name(c))).get<std::size_t>();
    r.histograms.tangential = summary.at("tangential").get<std::size_t>();
    r.histograms.curvature = summary.at("curvature").get<std::size_t>();

    for (const json& e : j.at("blocks")) {
      BlockAnalysis b;
      b.index = e.at("index").get<std::size_t>();
      b.source_line = e.at("source_line").get<int>();
      b.arc = e.at("kind").get<std::string>() == "arc";
      b.rapid = e.at("rapid").get<bool>();
      b.length = e.at("length_mm").get<double>();
      b.programmed_feed = e.at("programmed_feed_mm_s").get<double>();
      b.min_length = e.at("min_length_mm").get<double>();
      b.feed_cap = num_or_inf(e, "feed_cap_mm_s");
      b.reduction_pct = e.at("reduction_pct").get<double>();
      b.length_class = enum_field<LengthClass>(e, "length_class", length_class_from_name);
      r.blocks.push_back(b);
    }

    for (const json& e : j.at("junctions")) {
      JunctionAnalysis x;
      x.index = e.at("index").get<std::size_t>();
      x.source_line = e.at("source_line").get<int>();
      x.type = enum_field<JunctionType>(e, "type", junction_type_from_name);
      const json& loc = e.at("location_mm");
      x.location = {loc.at(0).get<double>(), loc.at(1).get<double>(), loc.at(2).get<double>()};
      x.beta = e.at("beta_rad").is_null() ? 0.0 : e.at("beta_rad").get<double>();
      x.r_before = num_or_inf(e, "r_before_mm");
      x.r_after = num_or_inf(e, "r_after_mm");
      x.opposite_turning = e.at("opposite_turning").get<bool>();
      x.programmed_feed = e.at("programmed_feed_mm_s").get<double>();
      x.predicted_feed = e.at("predicted_feed_mm_s").get<double>();
      x.reduction_pct = e.at("reduction_pct").get<double>();
      x.severity = enum_field<SeverityClass>(e, "severity", severity_from_name);
      x.binding = enum_field<Binding>(e, "binding", binding_from_name);
      if (!e.at("corner").is_null()) x.corner = corner_from_json(e.at("corner"));
      r.junctions.push_back(x);
    }
    for (const json& n : j.at("notes")) r.notes.push_back(n.get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("report: ") + e.what());
  }
}

std::string emit_json(const Report& report) { return report_to_json(report).dump(2) + "\n"; }

}  // namespace kerf
