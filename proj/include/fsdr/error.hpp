#pragma once

#include <stdexcept>
#include <string>

namespace fsdr {

/// Broad failure class. The CLI maps these onto process exit codes.
enum class ErrorKind {
    usage,      // bad parameters or incompatible configuration
    data,       // malformed or out-of-domain input data
    numerical,  // a decomposition or solve that cannot proceed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& w) : Error(ErrorKind::data, "dimension error: " + w) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::data, "domain error: " + w) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(ErrorKind::data, "validation error: " + w) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(ErrorKind::data, "parse error: " + w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::data, "io error: " + w) {}
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& w) : Error(ErrorKind::usage, "parameter error: " + w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::usage, "configuration error: " + w) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorKind::numerical, "numerical error: " + w) {}
};

}  // namespace fsdr
