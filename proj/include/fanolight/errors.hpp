#pragma once

#include <stdexcept>
#include <string>

namespace fanolight {

// Bad or inconsistent input (configuration, preconditions on values).
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A computation failed or left its guaranteed accuracy envelope.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate parameter combination (vanishing denominator, branch collision).
struct singular_error : numerical_error {
    explicit singular_error(const std::string& msg) : numerical_error(msg) {}
};

}  // namespace fanolight
