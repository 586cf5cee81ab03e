#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mgt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid input data. Carries the 1-based line number when the
/// input is line-oriented (0 when not applicable).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Invalid run configuration or command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (singular systems, non-finite values).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace mgt
