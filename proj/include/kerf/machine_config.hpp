#pragma once

// Machine configuration file:
//   {"axes": {"x": {"vmax_mm_min": .., "amax_m_s2": .., "jmax_m_s3": ..}, "y": .., "z": ..},
//    "tit_mm": .., "t_int_s": .., "delta_t_s": ..}
// Every field is required. Values are converted to mm, s on load.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "kerf/models.hpp"

namespace kerf {

// Throws ConfigError naming the offending field.
MachineLimits machine_from_json(const nlohmann::json& j);
MachineLimits load_machine_config(const std::filesystem::path& file);

// Inverse of machine_from_json (file units).
nlohmann::ordered_json machine_to_json(const MachineLimits& machine);

}  // namespace kerf
