#pragma once

#include <stdexcept>
#include <string>

namespace adolf {

/// Outcome classes used to map library failures onto process exit codes.
enum class ErrorKind {
  InvalidArgument,
  Shape,
  Config,
  Data,
  Numeric,
  NonConverged,
  NoConvergentStepsize,
  ComparisonInvalid,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) {
  return Error(ErrorKind::InvalidArgument, what);
}
inline Error shape_error(const std::string& what) {
  return Error(ErrorKind::Shape, what);
}
inline Error config_error(const std::string& what) {
  return Error(ErrorKind::Config, what);
}
inline Error data_error(const std::string& what) {
  return Error(ErrorKind::Data, what);
}
inline Error numeric_error(const std::string& what) {
  return Error(ErrorKind::Numeric, what);
}

/// Process exit code for a given error class. 0 is reserved for success.
int exit_code(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

}  // namespace adolf
