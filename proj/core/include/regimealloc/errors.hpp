#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace regimealloc {

enum class ErrorKind {
    Argument,              // bad call arguments or infeasible configuration
    Parse,                 // malformed input file content
    Validation,            // well-formed input violating a data rule
    Coverage,              // a required series does not cover the needed range
    Degenerate,            // an input too small or too flat to work with
    LinearAlgebra,         // singularity or factorization failure
    NumericalConsistency,  // internally inconsistent numerical results
    ReducibleChain,        // steady-state iteration failed to converge
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// Non-convergence of the stationary-distribution iteration; carries the last
/// iterate so callers can inspect how far the chain got.
class ReducibleChainError : public Error {
public:
    ReducibleChainError(const std::string& message, Eigen::VectorXd last_iterate)
        : Error(ErrorKind::ReducibleChain, message),
          last_iterate_(std::move(last_iterate)) {}

    const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

private:
    Eigen::VectorXd last_iterate_;
};

}  // namespace regimealloc
