#pragma once

#include <stdexcept>
#include <string>

namespace triflex {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A vector with norm below the coincidence threshold was normalized.
/// Signals that two agents (or a relative vector) degenerated; simulations
/// must abort rather than continue with fabricated directions.
struct DegenerateVector : Error {
    using Error::Error;
};

/// An error vector implies a non-positive link length (e_k + d_k <= 0).
struct InvalidErrorVec : Error {
    using Error::Error;
};

/// An angle-dependent formula was requested at a removable singularity
/// without a supported limit form.
struct SingularAngle : Error {
    using Error::Error;
};

/// An explicit operation precondition was violated by the caller.
struct PreconditionViolated : Error {
    using Error::Error;
};

/// Rejection sampling failed to produce an admissible state.
struct SamplingFailed : Error {
    using Error::Error;
};

/// Bad configuration: scenario file syntax, unknown keys, or invariant
/// violations in user-provided parameters.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace triflex
