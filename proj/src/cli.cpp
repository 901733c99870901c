#include "kerf/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "kerf/analyzer.hpp"
#include "kerf/emitters.hpp"
#include "kerf/errors.hpp"
#include "kerf/gcode.hpp"
#include "kerf/machine_config.hpp"
#include "kerf/service.hpp"
#include "kerf/version.hpp"

namespace kerf::cli {

namespace fs = std::filesystem;

namespace {

struct AnalyzeArgs {
  std::string input;
  std::string machine;
  std::string json_out;
  std::string csv_out;
  std::string svg_out;
  std::string view = "discontinuity";
  std::string plane = "xy";
  std::vector<double> bins;
  std::vector<double> start;
  bool serial = false;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_diagnostics(const std::string& file, const ParseResult& parsed, std::ostream& err) {
  for (const ParseDiagnostic& d : parsed.diagnostics)
    err << file << ":" << d.line << ": " << (d.severity == Severity::Error ? "error" : "warning")
        << ": " << d.message << " [" << d.text << "]\n";
}

// All-or-nothing: every artifact goes to a temp file first, then renamed.
bool write_outputs(const std::vector<std::pair<std::string, std::string>>& files, std::ostream& err) {
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto discard = [&] {
    std::error_code ec;
    for (const auto& [tmp, dst] : staged) fs::remove(tmp, ec);
  };
  for (const auto& [dest, content] : files) {
    std::error_code ec;
    if (fs::is_directory(dest, ec)) {
      err << "error: cannot write '" << dest << "': is a directory\n";
      return false;
    }
  }
  for (const auto& [dest, content] : files) {
    const fs::path dst(dest);
    fs::path tmp = dst;
    tmp += ".tmp." + std::to_string(::getpid());
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) staged.emplace_back(tmp, dst);
    if (!out || !(out << content) || !out.flush()) {
      err << "error: cannot write '" << dest << "'\n";
      discard();
      return false;
    }
  }
  for (const auto& [tmp, dst] : staged) {
    std::error_code ec;
    fs::rename(tmp, dst, ec);
    if (ec) {
      err << "error: cannot write '" << dst.string() << "': " << ec.message() << "\n";
      discard();
      return false;
    }
  }
  return true;
}

void print_summary(const Report& r, std::ostream& out) {
  const auto& h = r.histograms;
  out << "blocks: " << r.block_count << "\n";
  out << "length_class: Critical=" << h.length_class[0] << " Marginal=" << h.length_class[1]
      << " Ok=" << h.length_class[2] << "\n";
  out << "junctions: " << r.junctions.size() << " (tangential=" << h.tangential
      << " curvature=" << h.curvature << ")\n";
  out << "severity: None=" << h.severity[0] << " Moderate=" << h.severity[1]
      << " High=" << h.severity[2] << " Severe=" << h.severity[3] << "\n";
  const auto worst = std::max_element(
      r.junctions.begin(), r.junctions.end(),
      [](const JunctionAnalysis& a, const JunctionAnalysis& b) { return a.reduction_pct < b.reduction_pct; });
  if (worst == r.junctions.end()) {
    out << "worst_junction: none\n";
  } else {
    out << "worst_junction: index=" << worst->index << " line=" << worst->source_line
        << " type=" << junction_type_name(worst->type)
        << " predicted_feed_mm_s=" << fixed(worst->predicted_feed)
        << " reduction_pct=" << fixed(worst->reduction_pct)
        << " severity=" << severity_name(worst->severity) << "\n";
  }
  out << "cutting_length_mm: " << fixed(r.cutting_length) << "\n";
  out << "programmed_time_s: " << fixed(r.programmed_time) << "\n";
  out << "estimated_time_s: " << fixed(r.estimated_time) << "\n";
}

int run_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.machine.empty()) {
    err << "error: machine config required (--machine or KERF_MACHINE)\n";
    return kBadInvocation;
  }
  const auto text = read_file(a.input);
  if (!text) {
    err << "error: cannot read input file '" << a.input << "'\n";
    return kBadInvocation;
  }
  MachineLimits machine;
  try {
    machine = load_machine_config(a.machine);
  } catch (const ConfigError& e) {
    err << "error: machine config '" << a.machine << "': " << e.what() << "\n";
    return kBadInvocation;
  }

  AnalyzeOptions options;
  options.execution = a.serial ? Execution::Serial : Execution::Parallel;
  if (!a.bins.empty()) {
    if (a.bins.size() != 3 || !std::is_sorted(a.bins.begin(), a.bins.end()) || a.bins.front() < 0 ||
        a.bins.back() > 100) {
      err << "error: --bins expects three ascending edges within [0, 100]\n";
      return kBadInvocation;
    }
    std::copy(a.bins.begin(), a.bins.end(), options.bins.edges.begin());
  }
  Point3 start;
  if (!a.start.empty()) {
    if (a.start.size() != 3) {
      err << "error: --start expects x,y,z\n";
      return kBadInvocation;
    }
    start = {a.start[0], a.start[1], a.start[2]};
  }

  const ParseResult parsed = parse_program(*text, start);
  print_diagnostics(a.input, parsed, err);
  if (parsed.has_errors()) {
    err << a.input << ": " << parsed.error_count() << " line(s) rejected\n";
    return kProgramErrors;
  }

  Report report;
  try {
    report = analyze(parsed.path, machine, options);
  } catch (const EmptyPathError&) {
    err << a.input << ": no motion blocks\n";
    return kProgramErrors;
  } catch (const Error& e) {
    err << a.input << ": " << e.what() << "\n";
    return kProgramErrors;
  }

  std::vector<std::pair<std::string, std::string>> files;
  if (!a.json_out.empty()) files.emplace_back(a.json_out, emit_json(report));
  if (!a.csv_out.empty()) files.emplace_back(a.csv_out, emit_csv(report));
  if (!a.svg_out.empty()) {
    SvgStyle style;
    style.view = a.view == "ncu" ? SvgView::NcuCapacity : SvgView::Discontinuity;
    style.projection = a.plane == "xz" ? Plane::XZ : (a.plane == "yz" ? Plane::YZ : Plane::XY);
    files.emplace_back(a.svg_out, emit_svg(report, parsed.path, style));
  }
  if (!write_outputs(files, err)) return kBadInvocation;

  print_summary(report, out);
  return kOk;
}

int run_validate(const std::string& input, std::ostream& out, std::ostream& err) {
  const auto text = read_file(input);
  if (!text) {
    err << "error: cannot read input file '" << input << "'\n";
    return kBadInvocation;
  }
  const ParseResult parsed = parse_program(*text);
  print_diagnostics(input, parsed, err);
  out << "blocks: " << parsed.path.blocks.size() << "\n";
  out << "errors: " << parsed.error_count() << "\n";
  out << "warnings: " << parsed.diagnostics.size() - parsed.error_count() << "\n";
  return parsed.has_errors() ? kProgramErrors : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kerf: predicts where an HSM machine cannot hold the programmed feed"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  AnalyzeArgs a;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze a G-code program");
  analyze_cmd->add_option("input", a.input, "G-code file (.nc, .gcode, .tap)")->required();
  analyze_cmd->add_option("-m,--machine", a.machine, "Machine config JSON")->envname("KERF_MACHINE");
  analyze_cmd->add_option("--json", a.json_out, "Write kerf-report/1 JSON");
  analyze_cmd->add_option("--csv", a.csv_out, "Write block and junction tables");
  analyze_cmd->add_option("--svg", a.svg_out, "Write colour-coded SVG");
  analyze_cmd->add_option("--view", a.view, "SVG view")
      ->check(CLI::IsMember({"ncu", "discontinuity"}));
  analyze_cmd->add_option("--plane", a.plane, "SVG projection plane")
      ->check(CLI::IsMember({"xy", "xz", "yz"}));
  analyze_cmd->add_option("--bins", a.bins, "Severity bin edges in percent, e.g. 10,50,90")
      ->delimiter(',');
  analyze_cmd->add_option("--start", a.start, "Start position x,y,z (mm)")->delimiter(',');
  analyze_cmd->add_flag("--serial", a.serial, "Use the single-threaded reference path");

  std::string validate_input;
  auto* validate_cmd = app.add_subcommand("validate", "Parse only and report diagnostics");
  validate_cmd->add_option("input", validate_input, "G-code file")->required();

  service::ServerOptions serve_opts;
  std::string ui_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP analysis service");
  serve_cmd->add_option("--port", serve_opts.port, "TCP port")->required()->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", serve_opts.host, "Bind address");
  serve_cmd->add_option("--cors-origin", serve_opts.cors_origin, "Allowed CORS origin");
  serve_cmd->add_option("--ui-dir", ui_dir, "Static viewer bundle served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInvocation;
  }

  if (*analyze_cmd) return run_analyze(a, out, err);
  if (*validate_cmd) return run_validate(validate_input, out, err);
  if (!ui_dir.empty()) serve_opts.ui_dir = ui_dir;
  out << "serving on http://" << serve_opts.host << ":" << serve_opts.port << std::endl;
  if (!service::serve(serve_opts)) {
    err << "error: cannot listen on " << serve_opts.host << ":" << serve_opts.port << "\n";
    return kBadInvocation;
  }
  return kOk;
}

}  // namespace kerf::cli
