#ifndef MAGJAC_ERRORS_HPP
#define MAGJAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace magjac {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Metric failed the positive-definiteness check at a queried point.
struct DegenerateMetricError : Error {
    using Error::Error;
};

/// J_q p vanishes within tolerance; the canonical splitting is undefined here.
struct NotRegularError : Error {
    using Error::Error;
};

/// A trajectory left the declared chart domain.
struct ChartExitError : Error {
    using Error::Error;
};

/// The adaptive integrator could not continue (step size underflow or step budget).
struct StepFailureError : Error {
    using Error::Error;
};

/// A flow-derivative stencil failed its Richardson consistency check.
struct StencilAccuracyError : Error {
    using Error::Error;
};

/// A determinant root could not be bracketed/refined; message carries the interval.
struct RootBracketError : Error {
    using Error::Error;
};

/// Invalid scenario configuration or model parameters.
struct ConfigError : Error {
    using Error::Error;
};

/// Operation requested outside its supported scope (e.g. comparison bounds
/// for a field with nonvanishing covariant derivative).
struct ScopeError : Error {
    using Error::Error;
};

} // namespace magjac

#endif
