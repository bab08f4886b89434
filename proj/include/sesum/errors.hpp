#pragma once

#include <stdexcept>
#include <string>

namespace sesum {

// Bad user-supplied configuration (CLI exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure at runtime, e.g. quadrature that will not converge (CLI exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Request that cannot be satisfied within hard resource limits.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sesum
