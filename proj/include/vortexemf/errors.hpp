#pragma once

#include <stdexcept>
#include <string>

namespace vemf {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input rejected before any computation (bad parameters, broken invariants).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failure while computing on valid inputs.
class ComputationError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or data file.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

// field_core
class SingularEvaluation : public ComputationError {
 public:
  using ComputationError::ComputationError;
};
class InvalidDensity : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// topology
class SingularLoop : public ComputationError {
 public:
  using ComputationError::ComputationError;
};
class QuadratureFailure : public ComputationError {
 public:
  using ComputationError::ComputationError;
};
class AmbiguousEnclosure : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

// manybody
class DensityFloor : public ComputationError {
 public:
  using ComputationError::ComputationError;
};
class InvalidEnsemble : public ValidationError {
 public:
  using ValidationError::ValidationError;
};
class InvalidTemperature : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// nernst
class ScenarioTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};
class InvalidGradient : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace vemf
