#pragma once

#include <string>

#include <json.hpp>

#include "vidiff/pipeline.hpp"

namespace vidiff {

/// Canonical flat JSON form of a config; keys mirror the CLI flags.
nlohmann::json config_to_json(const GenerationConfig& config);

/// Applies JSON values onto a config. Unknown keys are config errors.
void apply_config_json(GenerationConfig& config, const nlohmann::json& j);

GenerationConfig load_config_file(const std::string& path);

/// FNV-1a hash of the canonical serialized config; changes whenever any
/// effective parameter changes.
std::string config_hash(const GenerationConfig& config);

}  // namespace vidiff
