#include "wfdelay/errors.hpp"

#include <utility>

namespace wfdelay {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::SuperluminalVelocity: return "superluminal-velocity";
    case ErrorKind::SingularSeparation: return "singular-separation";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::MonotonicityViolation: return "monotonicity-violation";
    case ErrorKind::IntervalMismatch: return "interval-mismatch";
    case ErrorKind::SmoothnessViolation: return "smoothness-violation";
    case ErrorKind::InvalidWorldline: return "invalid-worldline";
    case ErrorKind::InternalInvariant: return "internal-invariant-violation";
    case ErrorKind::ValidationFailure: return "validation-failure";
    case ErrorKind::InvalidAnchor: return "invalid-anchor";
    case ErrorKind::GuardSpeed: return "guard-speed";
    case ErrorKind::NoSolutionInWindow: return "no-solution-in-window";
    case ErrorKind::ConstructionInconsistency: return "construction-inconsistency";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::IoError: return "io-error";
    case ErrorKind::SchemaError: return "schema-error";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ValidationFailure:
    case ErrorKind::InvalidAnchor:
    case ErrorKind::SchemaError:
    case ErrorKind::IoError:
      return 2;
    case ErrorKind::GuardSpeed:
      return 3;
    case ErrorKind::SuperluminalVelocity:
    case ErrorKind::SingularSeparation:
    case ErrorKind::OutOfDomain:
    case ErrorKind::FitFailure:
    case ErrorKind::MonotonicityViolation:
    case ErrorKind::IntervalMismatch:
    case ErrorKind::SmoothnessViolation:
    case ErrorKind::InvalidWorldline:
    case ErrorKind::InternalInvariant:
    case ErrorKind::NoSolutionInWindow:
    case ErrorKind::ConstructionInconsistency:
    case ErrorKind::QuadratureFailure:
      return 4;
  }
  return 4;
}

std::string_view to_string(Side side) { return side == Side::future ? "future" : "past"; }

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

OutOfDomainError::OutOfDomainError(const std::string& what, double lo, double hi, Side failing_side)
    : Error(ErrorKind::OutOfDomain, what), lo_(lo), hi_(hi), side_(failing_side) {}

SmoothnessError::SmoothnessError(const std::string& what, std::vector<double> mismatch)
    : Error(ErrorKind::SmoothnessViolation, what), mismatch_(std::move(mismatch)) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace wfdelay
