#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sweeping {

/// Process exit codes used by the CLI. Library errors map onto these.
enum class ExitCode : int {
    ok = 0,
    config = 2,
    step_too_large = 3,
    solver = 4,
    io = 5,
};

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
    virtual ExitCode exit_code() const { return ExitCode::solver; }
};

/// Invalid configuration, scenario, or precondition violation.
class ConfigError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::config; }
};

/// A predicted point left the prox-regularity tube: the projection is no
/// longer guaranteed single-valued. Carries the offending node when known.
class StepTooLargeError : public Error {
public:
    StepTooLargeError(std::string msg, std::int64_t node = -1)
        : Error(std::move(msg)), node_(node) {}
    ExitCode exit_code() const override { return ExitCode::step_too_large; }
    std::int64_t node() const { return node_; }

private:
    std::int64_t node_;
};

/// Iterative solver failed to reach its certificate (cap hit, divergence,
/// infeasibility, geometric degeneracy).
class SolverError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::solver; }
};

/// An admissibility certificate could not be produced: (R_rho) fails or the
/// good-direction construction degenerates.
class AdmissibilityError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Filesystem / output failures.
class IoError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const override { return ExitCode::io; }
};

} // namespace sweeping
