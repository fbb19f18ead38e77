#pragma once

#include <stdexcept>
#include <string>

namespace cforge {

enum class ErrorKind {
  NotHyperbolic,
  NotElliptic,
  DomainError,
  NotInvariant,
  InvalidPermutation,
  NonPeriodicBase,
  NotIntervalPermutation,
  RefinementOverflow,
  NonPeriodic,
  AtomOverflow,
  MassMismatch,
  BudgetExceeded,
  SizeOverflow,
  BaseMismatch,
  NoEllipticWord,
  LiouvilleNotFound,
  RichnessEvidenceMissing,
  BridgeNotFound,
  BridgeTooFar,
  NoEllipticEll,
  PreconditionViolation,
  ParseError,
  InternalCheckFailed,
};

const char* error_name(ErrorKind kind);

/// True for the errors that signal an exhausted size or iteration budget.
bool is_budget_error(ErrorKind kind);

/// True for the errors that report a structured mathematical outcome.
bool is_domain_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind), detail_(message) {}

  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void check(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InternalCheckFailed, what);
}

}  // namespace cforge
