#pragma once

#include <stdexcept>
#include <string>

namespace pst {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Inputs degenerate enough that the result is undefined (e.g. coincident
// points for a bearing).
struct DegenerateInputError : Error {
  using Error::Error;
};

// Projective scale was non-positive: the point lies behind the camera.
struct BehindCameraError : Error {
  using Error::Error;
};

// Pixel row at or above the horizon line; it cannot be a ground point.
struct AboveHorizonError : Error {
  using Error::Error;
};

// Calibration source has no record for the requested camera id.
struct MissingEstimateError : Error {
  using Error::Error;
};

// Every candidate trajectory was filtered out.
struct NoRetainedTracksError : Error {
  using Error::Error;
};

// An operation that needs at least one element received none.
struct EmptyInputError : Error {
  using Error::Error;
};

// Optimization produced a non-finite loss.
struct DivergenceError : Error {
  using Error::Error;
};

// Estimates and ground truth share no observations.
struct NoOverlapError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace pst
