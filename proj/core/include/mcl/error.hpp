#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcl {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Invalid or inconsistent configuration (shapes, hyperparameter ranges).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

/// Invalid arguments to a pure operation (length mismatch, out-of-range n).
class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error("input", message) {}
};

/// Malformed record in a line-oriented file.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("parse", "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// NaN or Inf encountered in gradients, parameters or losses.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error("numeric", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace mcl
