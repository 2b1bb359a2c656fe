#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mps {

// Error taxonomy shared by the library and the CLI. The CLI maps each
// category to a process exit code: config 2, regime 3, convergence 4,
// geometry 5.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& message)
        : std::runtime_error(message), stage_(std::move(stage)) {}

    // Pipeline stage that raised the error ("config", "spectral-gate", ...).
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

// Bad configuration, malformed input files, violated data hypotheses.
class ConfigError : public Error {
public:
    using Error::Error;
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

// A spectral gate required by the solution theory does not hold.
class RegimeError : public Error {
public:
    using Error::Error;
};

// An iterative solver exhausted its budget without meeting tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::string stage, const std::string& message, double last_residual)
        : Error(std::move(stage), message), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_ = 0.0;
};

// The variational geometry could not be established or degenerated.
class GeometryError : public Error {
public:
    using Error::Error;
};

}  // namespace mps
