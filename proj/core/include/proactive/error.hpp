#pragma once

#include <stdexcept>
#include <string>

namespace proactive {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or schema (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, divergence or solver failure (exit code 4).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace proactive
