#include "qes/error.hpp"

namespace qes {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::LambdaSumNonzero: return "LambdaSumNonzero";
    case ErrorKind::NonpositiveEpsilon: return "NonpositiveEpsilon";
    case ErrorKind::MultivariatePhi: return "MultivariatePhi";
    case ErrorKind::DegeneratePhi: return "DegeneratePhi";
    case ErrorKind::InconsistentZeros: return "InconsistentZeros";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::NonsimpleZero: return "NonsimpleZero";
    case ErrorKind::NonintegrableSingularity: return "NonintegrableSingularity";
    case ErrorKind::TieNotOrthogonal: return "TieNotOrthogonal";
    case ErrorKind::SingularF: return "SingularF";
    case ErrorKind::OverflowingGrid: return "OverflowingGrid";
    case ErrorKind::SingularPotential: return "SingularPotential";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::MissingLevel: return "MissingLevel";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
  }
  return "Error";
}

}  // namespace qes
