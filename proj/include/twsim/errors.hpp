#pragma once

#include <stdexcept>
#include <string>

namespace twsim {

/// Malformed or inconsistent input (files, formats, arguments). CLI exit code 1.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// A resource budget was exceeded (tensor memory, solver vertex limit). CLI exit code 2.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

/// A mandatory empirical check failed (e.g. an expansion widened the graph).
struct verification_error : std::runtime_error {
    explicit verification_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twsim
