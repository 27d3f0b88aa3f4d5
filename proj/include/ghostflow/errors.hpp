#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ghostflow {

// Base class for everything a solver can throw.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Right-hand side of a constrained elliptic problem violates its solvability
// condition beyond what discretization error can explain.
struct CompatibilityViolation : SolverError {
    CompatibilityViolation(const std::string& what, double integral_)
        : SolverError(what), integral(integral_) {}
    double integral;
};

// The steady-transport smallness condition failed: the perturbation of the
// identity is too large for the scheme to be trustworthy.
struct SmallnessViolation : SolverError {
    SmallnessViolation(const std::string& what, double value_)
        : SolverError(what), value(value_) {}
    double value;
};

struct NonPositiveTemperature : SolverError {
    NonPositiveTemperature(const std::string& what, double min_value_)
        : SolverError(what), min_value(min_value_) {}
    double min_value;
};

// A fixed-point iteration ran out of iterations; `history` records the
// successive iterate-change norms so callers can inspect the (non-)contraction.
struct FixedPointDivergence : SolverError {
    FixedPointDivergence(const std::string& what, std::vector<double> history_)
        : SolverError(what), history(std::move(history_)) {}
    std::vector<double> history;
};

struct NewtonDivergence : SolverError {
    NewtonDivergence(const std::string& what, std::vector<double> residual_history_)
        : SolverError(what), residual_history(std::move(residual_history_)) {}
    std::vector<double> residual_history;
};

struct JacobianSingular : SolverError {
    using SolverError::SolverError;
};

// Outer remainder iterates left the invariant ball of the fixed-point map.
struct BallEscape : SolverError {
    BallEscape(const std::string& what, double norm_, double radius_)
        : SolverError(what), norm(norm_), radius(radius_) {}
    double norm;
    double radius;
};

struct LinearSolveFailure : SolverError {
    LinearSolveFailure(const std::string& what, double residual_)
        : SolverError(what), residual(residual_) {}
    double residual;
};

}  // namespace ghostflow
