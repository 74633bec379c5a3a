#pragma once

#include <stdexcept>

namespace telephase {

// A parameter outside its documented range.
struct invalid_parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Homodyne conditioning requested on a quadrature with non-positive marginal variance.
struct degenerate_measurement_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sensitivity requested where the signal derivative vanishes.
struct sensitivity_undefined_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Photon budget too small to support the requested number of teleportations.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace telephase
