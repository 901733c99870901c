#include "kerf/service.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>

#include <httplib.h>

#include "kerf/analyzer.hpp"
#include "kerf/emitters.hpp"
#include "kerf/errors.hpp"
#include "kerf/gcode.hpp"
#include "kerf/machine_config.hpp"
#include "kerf/version.hpp"

namespace kerf::service {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kChordError = 0.01;  // mm

Response error(int status, const std::string& message, const std::string& field = {}) {
  ojson j;
  j["error"] = message;
  if (!field.empty()) j["field"] = field;
  return {status, j.dump()};
}

double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

ojson point_json(Point3 p) { return {round6(p.x), round6(p.y), round6(p.z)}; }

ojson render_path(const ToolPath& path) {
  ojson out = ojson::array();
  for (std::size_t i = 0; i < path.blocks.size(); ++i) {
    const Block& b = path.blocks[i];
    ojson e;
    e["index"] = i;
    e["source_line"] = b.source_line;
    e["kind"] = b.is_arc() ? "arc" : "linear";
    e["rapid"] = b.rapid;
    ojson points = ojson::array();
    points.push_back(point_json(b.start()));
    if (b.is_arc()) {
      const ArcMove& a = b.arc();
      const double r = arc_radius(a);
      const double sweep = swept_angle(a);
      // Sagitta r (1 - cos(step / 2)) stays within the chord error.
      const double step = r > kChordError ? 2.0 * std::acos(1.0 - kChordError / r) : std::numbers::pi;
      const int n = std::max(2, static_cast<int>(std::ceil(sweep / step)));
      for (int k = 1; k < n; ++k) points.push_back(point_json(point_at(b, static_cast<double>(k) / n)));
      ojson arc;
      arc["center"] = point_json(a.center);
      arc["radius"] = round6(r);
      arc["plane"] = plane_name(a.plane);
      arc["clockwise"] = a.clockwise;
      arc["sweep_rad"] = round6(sweep);
      e["arc"] = arc;
    }
    points.push_back(point_json(b.end()));
    e["points"] = std::move(points);
    out.push_back(std::move(e));
  }
  return out;
}

std::optional<Response> read_options(const json& req, AnalyzeOptions& options, Point3& start) {
  const auto it = req.find("options");
  if (it == req.end() || it->is_null()) return std::nullopt;
  if (!it->is_object()) return error(422, "options: must be an object", "options");

  if (const auto bins = it->find("bins"); bins != it->end()) {
    if (!bins->is_array() || bins->size() != 3)
      return error(422, "options.bins: expected three edges", "options.bins");
    double prev = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const json& e = (*bins)[i];
      if (!e.is_number() || e.get<double>() < prev || e.get<double>() > 100.0)
        return error(422, "options.bins: edges must be ascending within [0, 100]", "options.bins");
      prev = options.bins.edges[i] = e.get<double>();
    }
  }
  if (const auto view = it->find("view"); view != it->end()) {
    if (!view->is_string() || (*view != "ncu" && *view != "discontinuity"))
      return error(422, "options.view: expected \"ncu\" or \"discontinuity\"", "options.view");
  }
  if (const auto s = it->find("start"); s != it->end()) {
    if (!s->is_array() || s->size() != 3 || !(*s)[0].is_number() || !(*s)[1].is_number() ||
        !(*s)[2].is_number())
      return error(422, "options.start: expected [x, y, z]", "options.start");
    start = {(*s)[0].get<double>(), (*s)[1].get<double>(), (*s)[2].get<double>()};
  }
  return std::nullopt;
}

}  // namespace

std::string request_hash(const nlohmann::json& request) {
  const std::string canonical = request.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Response handle_analyze(std::string_view body) {
  if (body.size() > kMaxRequestBytes) return error(413, "request body exceeds 20 MB");

  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error& e) {
    return error(400, std::string("malformed JSON: ") + e.what());
  }
  if (!req.is_object()) return error(400, "request must be a JSON object");

  const auto gcode = req.find("gcode");
  if (gcode == req.end() || !gcode->is_string())
    return error(422, "gcode: must be a string", "gcode");
  if (gcode->get_ref<const std::string&>().empty())
    return error(422, "gcode: must be non-empty", "gcode");

  const auto machine_json = req.find("machine");
  if (machine_json == req.end()) return error(422, "machine: missing", "machine");
  MachineLimits machine;
  try {
    machine = machine_from_json(*machine_json);
  } catch (const ConfigError& e) {
    return error(422, std::string("machine.") + e.what(), "machine." + e.field());
  }

  AnalyzeOptions options;
  Point3 start;
  if (auto bad = read_options(req, options, start)) return *bad;

  const ParseResult parsed = parse_program(gcode->get_ref<const std::string&>(), start);

  ojson out;
  out["request_hash"] = request_hash(req);
  out["report"] = nullptr;
  if (!parsed.path.blocks.empty()) {
    try {
      out["report"] = report_to_json(analyze(parsed.path, machine, options));
    } catch (const Error& e) {
      out["analysis_error"] = e.what();
    }
  } else {
    out["analysis_error"] = "no motion blocks";
  }

  ojson diags = ojson::array();
  for (const ParseDiagnostic& d : parsed.diagnostics) {
    ojson e;
    e["line"] = d.line;
    e["severity"] = d.severity == Severity::Error ? "error" : "warning";
    e["message"] = d.message;
    e["text"] = d.text;
    diags.push_back(std::move(e));
  }
  out["diagnostics"] = std::move(diags);
  out["path"] = render_path(parsed.path);
  return {200, out.dump()};
}

Response handle_health(std::chrono::steady_clock::time_point started) {
  const double uptime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  ojson j;
  j["status"] = "ok";
  j["version"] = kVersion;
  j["uptime_s"] = std::round(uptime * 1000.0) / 1000.0;
  return {200, j.dump()};
}

void configure(httplib::Server& server, const ServerOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  server.set_payload_max_length(kMaxRequestBytes);
  server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin}});

  server.Post("/api/analyze", [](const httplib::Request& req, httplib::Response& res) {
    const Response r = handle_analyze(req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  server.Get("/api/health", [started](const httplib::Request&, httplib::Response& res) {
    const Response r = handle_health(started);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, HEAD, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  if (options.ui_dir) server.set_mount_point("/", options.ui_dir->string());
}

bool serve(const ServerOptions& options) {
  httplib::Server server;
  configure(server, options);
  return server.listen(options.host, options.port);
}

}  // namespace kerf::service
