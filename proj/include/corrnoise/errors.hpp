#pragma once

#include <stdexcept>
#include <string>

namespace corrnoise {

/// Bad user-supplied parameters (negative rates, unphysical correlation,
/// malformed grids). The CLI maps this to exit code 2.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Matrix expected to be positive semidefinite has an eigenvalue below the
/// clamping tolerance.
class PsdViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// NaN/Inf or loss of structure during a run. The CLI maps this to exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace corrnoise
