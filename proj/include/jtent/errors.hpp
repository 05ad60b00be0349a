#pragma once

#include <stdexcept>
#include <string>

namespace jtent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain error: " + what) {}
};

/// Evaluation at a coordinate singularity (q = 0 in the rotated-field terms).
class SingularityError : public DomainError {
public:
    explicit SingularityError(const std::string& what) : DomainError(what) {}
};

/// The radial grid is too short: the wavefunction tail has not decayed.
class CutoffError : public Error {
public:
    explicit CutoffError(const std::string& what) : Error("cutoff error: " + what) {}
};

/// Eigenpair extraction failed.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error("solver error: " + what) {}
};

/// Grid refinement exhausted its budget.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error("convergence error: " + what) {}
};

/// The shooting oracle could not bracket the ground state.
class OracleError : public Error {
public:
    explicit OracleError(const std::string& what) : Error("oracle error: " + what) {}
};

/// Inputs violate a precondition that only an upstream bug can produce.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error("contract error: " + what) {}
};

/// Bloch vector at the origin, where lambda_min is 0/0.
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error("degenerate input: " + what) {}
};

/// Asymptotic formula requested outside its regime gate.
class RegimeError : public Error {
public:
    explicit RegimeError(const std::string& what) : Error("regime error: " + what) {}
};

/// Invalid sweep / scaling configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

} // namespace jtent
