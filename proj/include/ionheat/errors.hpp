#pragma once

#include <stdexcept>
#include <string>

namespace ionheat {

// Configuration problems: reported to the user, exit code 2 at the CLI.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical invariant broken at runtime (trace, Hermiticity, positivity,
// non-finite entries): exit code 3 at the CLI, manifest still written.
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ionheat
