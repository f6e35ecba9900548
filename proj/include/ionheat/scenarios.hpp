// scenarios.hpp — Named experiment runner and run manifest

#pragma once

#include "ionheat/config.hpp"

#include <string>

namespace ionheat::scenarios {

inline constexpr const char* version = "0.1.0";

struct RunOptions {
    std::string config_path;
    std::string scenario_override;
    std::string out_override;
    int threads_override{0};
};

// Exit codes: 0 success, 2 invalid config, 3 runtime invariant violation
// (manifest still written).
int run(const RunOptions& opts);

// Prints the validation report; 0 when all checks pass, 2 otherwise.
int validate_cli(const std::string& config_path);

} // namespace ionheat::scenarios
