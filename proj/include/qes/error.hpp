#pragma once

#include <stdexcept>
#include <string>

namespace qes {

enum class ErrorKind {
  // expression parsing and evaluation
  SyntaxError,
  UnknownIdentifier,
  DomainError,
  // generating sets
  LambdaSumNonzero,
  NonpositiveEpsilon,
  MultivariatePhi,
  DegeneratePhi,
  InconsistentZeros,
  ConstraintViolated,
  NonsimpleZero,
  NonintegrableSingularity,
  // model assembly
  TieNotOrthogonal,
  SingularF,
  // grids and discrete operators
  OverflowingGrid,
  SingularPotential,
  DimensionMismatch,
  // eigensolvers
  NoConvergence,
  TooLarge,
  EmptyWindow,
  MissingLevel,
  // configuration
  ConfigError,
  UnknownPreset,
};

const char* error_kind_name(ErrorKind kind);

/// Library-wide exception. `kind()` identifies the failure class, the
/// message carries the specifics (offending value, axis, point, ...).
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  /// Byte offset for parse errors, -1 otherwise.
  long offset() const { return offset_; }
  Error& with_offset(long off) {
    offset_ = off;
    return *this;
  }

private:
  ErrorKind kind_;
  long offset_ = -1;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace qes
