#pragma once

#include <stdexcept>
#include <string>

namespace fsns {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct SetupError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  using Error::Error;
};

struct SearchFailure : Error {
  using Error::Error;
};

/// Malformed or truncated checkpoint file.
struct FormatError : Error {
  using Error::Error;
};

/// Raised when the Jacobian of the strip map drops below its floor or a
/// state becomes non-finite. Carries the offending grid node.
struct BreakdownError : Error {
  BreakdownError(const std::string& what, int level, int column, double value)
      : Error(what), level(level), column(column), value(value) {}
  int level;
  int column;
  double value;
};

struct NonConvergence : Error {
  NonConvergence(const std::string& what, int iterations, double residual)
      : Error(what), iterations(iterations), residual(residual) {}
  int iterations;
  double residual;
};

}  // namespace fsns
