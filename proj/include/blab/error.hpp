#pragma once

#include <stdexcept>
#include <string>

namespace blab {

enum class ErrorKind {
  InvalidGrid,
  InvalidArgument,
  UnsupportedField,
  FrequencyOverflow,
  EllipticityViolation,
  MaxIterExceeded,
  NoConvergence,
  MismatchedSolutions,
  MeshTooCoarse,
  SolverFailure,
  DimensionMismatch,
  TargetUnreachable,
  OutOfDomain,
  UnknownScenario,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type; `kind()` lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown when an iterative solve stops before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(ErrorKind kind, const std::string& what, double last_residual, int iterations)
      : Error(kind, what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace blab
