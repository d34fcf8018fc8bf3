#pragma once

#include <stdexcept>
#include <string>

namespace sodexo {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid scenario configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A model operation was called outside its domain (CLI exit code 3).
class ModelError : public Error {
public:
    using Error::Error;
};

} // namespace sodexo
