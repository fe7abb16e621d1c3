#pragma once

#include <stdexcept>
#include <string>

namespace mptrack {

// Error taxonomy. The three mid-level categories map onto CLI exit codes:
// validation -> 2, I/O -> 3, numerical failure -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

/// Too few data points for the requested estimation.
struct InsufficientDataError : ValidationError {
  using ValidationError::ValidationError;
};

/// Replay queried outside the frame range it covers.
struct MissingFrameError : ValidationError {
  using ValidationError::ValidationError;
};

/// A metric was requested over an empty effective sample.
struct UndefinedMetricError : ValidationError {
  using ValidationError::ValidationError;
};

/// Input geometry admits no unique solution (collinear points, rank loss).
struct DegenerateConfigurationError : NumericalError {
  using NumericalError::NumericalError;
};

/// Projective division by a weight within epsilon of zero.
struct PointAtInfinityError : NumericalError {
  using NumericalError::NumericalError;
};

/// A matrix that must be inverted is numerically singular.
struct SingularMatrixError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace mptrack
