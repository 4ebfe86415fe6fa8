#pragma once

#include <stdexcept>
#include <string>

namespace bubbletree {

// Invalid user-supplied parameters (bad bounds, mismatched grids, bad signs).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to meet its contract (divergence, drift, NaN).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested rescaling falls outside what the grid can resolve.
struct ScaleResolutionError : NumericalError {
    using NumericalError::NumericalError;
};

// Fixed-point or Newton iteration left its convergence basin.
struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

// Bubble scales collided (mu_j no longer small).
struct CollisionError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace bubbletree
