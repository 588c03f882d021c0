#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfdelay {

enum class ErrorKind {
  InvalidArgument,
  SuperluminalVelocity,
  SingularSeparation,
  OutOfDomain,
  FitFailure,
  MonotonicityViolation,
  IntervalMismatch,
  SmoothnessViolation,
  InvalidWorldline,
  InternalInvariant,
  ValidationFailure,
  InvalidAnchor,
  GuardSpeed,
  NoSolutionInWindow,
  ConstructionInconsistency,
  QuadratureFailure,
  IoError,
  SchemaError,
};

std::string_view to_string(ErrorKind kind);

// CLI exit status for a failure kind: 2 validation/schema, 3 guard stop, 4 numerical.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class Side { past, future };

std::string_view to_string(Side side);

// Raised when a time falls outside the covered interval of a worldline.
class OutOfDomainError : public Error {
 public:
  OutOfDomainError(const std::string& what, double lo, double hi, Side failing_side);
  double covered_lo() const noexcept { return lo_; }
  double covered_hi() const noexcept { return hi_; }
  Side failing_side() const noexcept { return side_; }

 private:
  double lo_;
  double hi_;
  Side side_;
};

// Join check failure; mismatch[k] is the relative defect of derivative order k.
class SmoothnessError : public Error {
 public:
  SmoothnessError(const std::string& what, std::vector<double> mismatch);
  const std::vector<double>& mismatch() const noexcept { return mismatch_; }

 private:
  std::vector<double> mismatch_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace wfdelay
