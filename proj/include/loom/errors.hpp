#pragma once

#include <stdexcept>
#include <string>

namespace loom {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thumbwheel nibble outside 0..9.
class BcdError : public Error {
public:
    using Error::Error;
};

/// Invalid machine configuration (zero divisor, bad range, unknown shift).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Scenario file failed parsing or validation.
class ScenarioError : public Error {
public:
    using Error::Error;
};

/// File read/write failure, with path context in the message.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace loom
