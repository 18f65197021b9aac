#pragma once

#include <stdexcept>
#include <string>

namespace dprls {

// Invalid caller input: shapes, signs, preconditions.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite values or a singular system in a numerical routine.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The RLS covariance lost positive definiteness.
class BreakdownError : public NumericError {
public:
    using NumericError::NumericError;
};

// Noise calibration requested for a system that is not asymptotically
// stable; no finite Laplace scale gives epsilon-DP there.
class CalibrationImpossible : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Adversarial construction requested where it cannot exist (stable system,
// zero leading input coefficient, short prefix).
class ConstructionImpossible : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace dprls
