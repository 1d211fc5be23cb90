#pragma once

#include <stdexcept>
#include <string>

namespace gapforge {

// Thrown when an operation would exceed its configured memory budget.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters / preconditions (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gapforge
