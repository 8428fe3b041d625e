#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpf {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

/// Raised when a matrix assumed SPD shows a non-positive curvature or quadratic form.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Case-file or matrix-file syntax error. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structural problem with a network case (unknown bus, bad reactance, disconnected graph).
class NetworkError : public Error {
public:
    using Error::Error;
};

} // namespace qpf
