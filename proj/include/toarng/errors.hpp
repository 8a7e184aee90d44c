// Error taxonomy shared by the library and the CLI. Each class maps to one
// process exit code so failures are scriptable.
#pragma once

#include <stdexcept>
#include <string>

namespace toarng {

/// Bad parameters or an inconsistent configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// I/O failures and malformed or truncated files. CLI exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Input that makes a statistic undefined (too short, zero variance, ...).
/// CLI exit code 4.
class StatError : public std::runtime_error {
public:
    explicit StatError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace toarng
