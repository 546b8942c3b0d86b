#pragma once

#include <stdexcept>
#include <string>

namespace fluxmech {

/// Invalid physical parameters or malformed configuration input.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-convergence, singular systems, step underflow.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File-system failure while reading or writing artifacts.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace fluxmech
