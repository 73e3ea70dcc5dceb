#pragma once

#include <string>

#include <json.hpp>

#include "odo/dynamics.hpp"

namespace odo {

/// Schema-validates the raw config: known keys only, required fields present,
/// values in range. Throws ConfigError with the offending path.
void validate_config(const nlohmann::json& cfg);

/// FNV-1a 64 over the canonical (sorted-key, compact) dump.
std::string config_hash(const nlohmann::json& cfg);

BaseSequence space_from_config(const nlohmann::json& cfg);

/// Builds the system named by the config's family section (presets or a
/// table file). For the feldman preset the space comes from the word system
/// itself.
OdomutantSystem system_from_config(const nlohmann::json& cfg);

Point point_from_json(const BaseSequence& space, const nlohmann::json& j);

BigRat rat_from_json(const nlohmann::json& j);

}  // namespace odo
