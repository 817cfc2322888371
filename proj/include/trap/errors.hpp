#pragma once

#include <stdexcept>
#include <string>

namespace trap {

/// An iterative method (root bracket, quadrature refinement, inversion ladder)
/// did not reach its tolerance.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computed object violates a structural invariant (negative probability,
/// broken interlacing, resampling budget exhausted).
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace trap
