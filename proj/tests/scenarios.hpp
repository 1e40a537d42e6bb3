#pragma once

#include <string>

#include "conncoord/config.hpp"

namespace conncoord::testing {

inline std::string scenario_path(const std::string& name) {
    return std::string(CONNCOORD_SCENARIO_DIR) + "/" + name + ".json";
}

inline ScenarioConfig load_scenario(const std::string& name) {
    return parse_config(scenario_path(name)).config;
}

}  // namespace conncoord::testing
