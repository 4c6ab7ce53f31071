#pragma once

#include <stdexcept>
#include <string>

namespace leechsim {

// Malformed input text (plan files, config files, CSV traces, frame images).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally well-formed input that violates a model invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller broke an operation's precondition.
struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver hit its iteration cap before reaching tolerance.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Geometry with no measurable structure (e.g. zero boundary corners).
struct DegenerateGeometryError : std::runtime_error {
    explicit DegenerateGeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Frame-sequence tracking could not produce a trace.
struct ExtractionError : std::runtime_error {
    explicit ExtractionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace leechsim
