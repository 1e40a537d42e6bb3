#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "conncoord/scenario.hpp"

namespace conncoord {

struct ParsedConfig {
    ScenarioConfig config;
    /// Dotted key paths that were absent and filled with defaults.
    std::vector<std::string> defaults_applied;
};

/// Reads and validates a JSON scenario. Unknown keys, wrong types and
/// invariant violations raise ConfigError with the offending key path.
ParsedConfig parse_config(const std::filesystem::path& path);
ParsedConfig parse_config_text(std::string_view text);

/// JSON with every key written explicitly; parse_config_text(emit_config(c)).config == c.
std::string emit_config(const ScenarioConfig& cfg);

}  // namespace conncoord
