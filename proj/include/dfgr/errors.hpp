#pragma once

#include <stdexcept>
#include <string>

namespace dfgr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures of the physics or of the numerics (CLI exit status 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A kernel was evaluated on one of its poles (sin or tan of Omega*t vanished).
class SingularKernel : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Consecutive samples of a square-rooted quantity jumped by pi/2 or more in
/// phase; the time grid is too coarse to continue the branch.
class BranchAmbiguity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotOrthogonal : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonconvergedRate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Second-order population left the regime where the golden rule applies.
class PerturbationBreakdown : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Configuration problems (CLI exit status 3).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace dfgr
