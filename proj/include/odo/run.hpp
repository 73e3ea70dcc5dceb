#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace odo {

struct RunResult {
    std::vector<std::string> files;
    std::string summary;
};

/// Executes one config. Throws the module errors; the CLI maps them to exit
/// codes (0 ok, 2 config, 3 precondition/domain, 4 resource, 5 internal).
RunResult run_config(const nlohmann::json& cfg);

}  // namespace odo
