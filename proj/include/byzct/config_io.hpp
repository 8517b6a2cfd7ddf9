#pragma once

#include <string>

#include "byzct/simnet.hpp"
#include "json.hpp"

namespace byzct {

/// Config file layout mirrors SimConfig:
///   {"n_plus_1": 7, "t": 1, "faulty": [6], "protocol": "kset",
///    "inputs": [...], "adversary": {"kind": "equivocate", ...},
///    "seed": 1, "fairness_bound": 64, "depth": 1, "max_subdiv": 2,
///    "task": {...} | "task_file": "path", "core_size": 2,
///    "mutation": {"quorum_threshold_shift": 0, "echo_threshold_shift": 0}}
/// `task_file` is resolved against `base_dir`. Throws ConfigError with the
/// offending key in the message.
SimConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
SimConfig load_config(const std::string& path);

nlohmann::json config_to_json(const SimConfig& c);

}  // namespace byzct
