#include "kerf/machine_config.hpp"

#include <fstream>
#include <sstream>

#include "kerf/errors.hpp"

namespace kerf {

namespace {

double number_field(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path, "missing");
  if (!it->is_number()) throw ConfigError(path, "must be a number");
  return it->get<double>();
}

AxisLimits axis_from_json(const nlohmann::json& axes, const char* name) {
  const std::string prefix = std::string("axes.") + name;
  const auto it = axes.find(name);
  if (it == axes.end()) throw ConfigError(prefix, "missing");
  if (!it->is_object()) throw ConfigError(prefix, "must be an object");
  AxisLimits a;
  a.vmax = number_field(*it, "vmax_mm_min", prefix + ".vmax_mm_min") / 60.0;
  a.amax = number_field(*it, "amax_m_s2", prefix + ".amax_m_s2") * 1000.0;
  a.jmax = number_field(*it, "jmax_m_s3", prefix + ".jmax_m_s3") * 1000.0;
  return a;
}

nlohmann::ordered_json axis_to_json(const AxisLimits& a) {
  nlohmann::ordered_json j;
  j["vmax_mm_min"] = a.vmax * 60.0;
  j["amax_m_s2"] = a.amax / 1000.0;
  j["jmax_m_s3"] = a.jmax / 1000.0;
  return j;
}

}  // namespace

MachineLimits machine_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("machine", "must be a JSON object");
  const auto axes = j.find("axes");
  if (axes == j.end()) throw ConfigError("axes", "missing");
  if (!axes->is_object()) throw ConfigError("axes", "must be an object");

  MachineLimits m;
  m.x = axis_from_json(*axes, "x");
  m.y = axis_from_json(*axes, "y");
  m.z = axis_from_json(*axes, "z");
  m.tit = number_field(j, "tit_mm", "tit_mm");
  m.t_int = number_field(j, "t_int_s", "t_int_s");
  m.delta_t = number_field(j, "delta_t_s", "delta_t_s");
  validate(m);
  return m;
}

MachineLimits load_machine_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string(), "cannot open machine config");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string(), std::string("malformed JSON: ") + e.what());
  }
  return machine_from_json(j);
}

nlohmann::ordered_json machine_to_json(const MachineLimits& machine) {
  nlohmann::ordered_json j;
  j["axes"]["x"] = axis_to_json(machine.x);
  j["axes"]["y"] = axis_to_json(machine.y);
  j["axes"]["z"] = axis_to_json(machine.z);
  j["tit_mm"] = machine.tit;
  j["t_int_s"] = machine.t_int;
  j["delta_t_s"] = machine.delta_t;
  return j;
}

}  // namespace kerf
