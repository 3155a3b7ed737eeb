#include "adolf/error.hpp"

namespace adolf {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
      return 2;
    case ErrorKind::Data:
      return 3;
    case ErrorKind::Numeric:
      return 4;
    case ErrorKind::NoConvergentStepsize:
      return 5;
    case ErrorKind::ComparisonInvalid:
      return 6;
    case ErrorKind::NonConverged:
      return 7;
    case ErrorKind::Shape:
      return 8;
    case ErrorKind::Io:
      return 9;
  }
  return 1;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Config: return "config";
    case ErrorKind::Data: return "data";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::NonConverged: return "non-converged";
    case ErrorKind::NoConvergentStepsize: return "no-convergent-stepsize";
    case ErrorKind::ComparisonInvalid: return "comparison-invalid";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace adolf
