#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "fairrank/pipeline.hpp"

namespace fairrank::cli {

/**
 * Reads an experiment config from JSON. Unknown keys, wrong types and
 * out-of-range values are InvalidInput errors naming the field path.
 * Relative dataset paths resolve against `base_dir`.
 */
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully-populated JSON form of a config (every default spelled out, keys sorted).
nlohmann::json to_json(const ExperimentConfig& config);

/// Canonical text: to_json dumped compactly.
std::string canonical(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string fingerprint(const ExperimentConfig& config);

} // namespace fairrank::cli
