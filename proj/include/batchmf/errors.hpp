// Exception types shared by all modules. The CLI maps these to exit codes:
// ConfigError -> 2, ResourceError -> 3, NumericError -> 4.
#pragma once

#include <stdexcept>
#include <string>

namespace batchmf {

// Invalid or inconsistent user input: bad JSON, violated config invariants,
// out-of-domain arguments.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation was refused because it would exceed a configured limit
// (state-space cap, transient-analysis cap).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure failed: singular linear system, rank-deficient
// design, diverging integration.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace batchmf
