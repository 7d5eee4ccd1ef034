#include "blab/grid.hpp"

#include <string>

#include "blab/error.hpp"

namespace blab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedField: return "UnsupportedField";
    case ErrorKind::FrequencyOverflow: return "FrequencyOverflow";
    case ErrorKind::EllipticityViolation: return "EllipticityViolation";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MismatchedSolutions: return "MismatchedSolutions";
    case ErrorKind::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Grid Grid::make(int n, double half_width) {
  if (n < 8 || (n & (n - 1)) != 0) {
    throw Error(ErrorKind::InvalidGrid, "node count must be a power of two >= 8, got " +
                                            std::to_string(n));
  }
  if (!(half_width >= 2.0)) {
    throw Error(ErrorKind::InvalidGrid, "half-width must be >= 2, got " +
                                            std::to_string(half_width));
  }
  return Grid(n, half_width);
}

}  // namespace blab
