#pragma once
#include <stdexcept>
#include <string>

namespace enrnn {

// Violated precondition or shape contract on an operation.
struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative solver (QR iteration, power iteration, linear solve) failed
// to converge or hit a singular system; carries the last residual seen.
struct SolverFailure : std::runtime_error {
    double residual;
    SolverFailure(const std::string& what, double res)
        : std::runtime_error(what + " (residual=" + std::to_string(res) + ")"), residual(res) {}
};

// Dominant eigenvalue is (numerically) multiple: |v*u| ~ 0, the eigenvalue
// derivative is ill-conditioned. Callers fall back to the unnormalized step.
struct DefectiveEigenvalue : std::runtime_error {
    explicit DefectiveEigenvalue(const std::string& what) : std::runtime_error(what) {}
};

struct CheckpointError : std::runtime_error {
    explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace enrnn
