#pragma once

#include <stdexcept>
#include <string>

namespace oscavg {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration: unknown key, out-of-range
/// tolerance, unresolved model name, malformed list.
struct ConfigError : Error {
  using Error::Error;
};

/// Numerical failure while running an experiment.
struct NumericalError : Error {
  using Error::Error;
};

/// Query outside the stored range of a trajectory or sweep.
struct RangeError : NumericalError {
  using NumericalError::NumericalError;
};

/// State outside a model's admissible region.
struct AdmissibilityError : NumericalError {
  using NumericalError::NumericalError;
};

/// A structural hypothesis of the method (H > 0, H strictly decreasing)
/// does not hold on the data at hand.
struct HypothesisError : NumericalError {
  using NumericalError::NumericalError;
};

/// Quadrature failed its node-doubling convergence check.
struct QuadratureError : NumericalError {
  using NumericalError::NumericalError;
};

/// A model evaluation produced a non-finite value.
struct EvaluationError : NumericalError {
  using NumericalError::NumericalError;
};

/// Data unsuitable for the requested reduction (too few points,
/// nonpositive values where a log is needed).
struct DegenerateDataError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace oscavg
