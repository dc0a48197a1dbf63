#ifndef FUELGAN_ERRORS_HPP
#define FUELGAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fuelgan {

// Base error carrying a machine-parsable category and the process exit code
// the CLI maps it to (io=2, config=3, everything precondition-like=4).
class Error : public std::runtime_error {
public:
    Error(std::string category, int exit_code, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)), exit_code_(exit_code) {}

    const std::string& category() const { return category_; }
    int exit_code() const { return exit_code_; }

private:
    std::string category_;
    int exit_code_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", 2, message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", 3, message) {}
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& message) : Error("schema", 4, message) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& message) : Error("dimension", 4, message) {}
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& message) : Error("argument", 4, message) {}
};

// Violated operation precondition (unscaled inputs, un-derived features, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("domain", 4, message) {}
};

// Missing or stale internal state (e.g. backward without a forward cache).
class StateError : public Error {
public:
    explicit StateError(const std::string& message) : Error("state", 4, message) {}
};

} // namespace fuelgan

#endif
