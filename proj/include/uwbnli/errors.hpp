#pragma once

#include <stdexcept>
#include <string>

namespace uwbnli {

enum class ErrorKind { config, solver, quadrature, numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Process exit status the CLI reports for this error.
    int exit_code() const noexcept {
        switch (kind_) {
        case ErrorKind::config: return 2;
        case ErrorKind::solver: return 3;
        case ErrorKind::quadrature: return 4;
        case ErrorKind::numeric: return 1;
        }
        return 1;
    }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(ErrorKind::solver, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double change_db)
        : Error(ErrorKind::quadrature, what), change_db_(change_db) {}
    double change_db() const noexcept { return change_db_; }

private:
    double change_db_;
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::solver: return "solver";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
}

}  // namespace uwbnli
