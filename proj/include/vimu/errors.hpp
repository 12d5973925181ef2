#pragma once

#include <stdexcept>
#include <string>

namespace vimu {

/// Malformed input: bad syntax, wrong schema, unknown headers.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally valid input that violates a semantic contract
/// (non-tree hierarchy, non-finite value, shape mismatch, ...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure: unreadable input, unwritable output.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vimu
