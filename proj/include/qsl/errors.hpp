// errors.hpp — exception types thrown across the library
#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

// Input-contract violations.
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonHermitianInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct TooFewSamples : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct LayoutMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AsymmetricTable : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct OverrideShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Configuration errors (CLI exit code 2).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures (CLI exit code 3).
struct NonFiniteDerivative : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureNotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct KernelRangeExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AllTrajectoriesFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Raised when the failed-trajectory fraction exceeds the abort threshold
// (a step-size problem rather than bad luck).
struct ExcessiveTrajectoryFailures : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qsl
