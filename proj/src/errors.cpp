#include "cforge/errors.hpp"

namespace cforge {

const char* error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::NotElliptic: return "NotElliptic";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::InvalidPermutation: return "InvalidPermutation";
    case ErrorKind::NonPeriodicBase: return "NonPeriodicBase";
    case ErrorKind::NotIntervalPermutation: return "NotIntervalPermutation";
    case ErrorKind::RefinementOverflow: return "RefinementOverflow";
    case ErrorKind::NonPeriodic: return "NonPeriodic";
    case ErrorKind::AtomOverflow: return "AtomOverflow";
    case ErrorKind::MassMismatch: return "MassMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::SizeOverflow: return "SizeOverflow";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::NoEllipticWord: return "NoEllipticWord";
    case ErrorKind::LiouvilleNotFound: return "LiouvilleNotFound";
    case ErrorKind::RichnessEvidenceMissing: return "RichnessEvidenceMissing";
    case ErrorKind::BridgeNotFound: return "BridgeNotFound";
    case ErrorKind::BridgeTooFar: return "BridgeTooFar";
    case ErrorKind::NoEllipticEll: return "NoEllipticEll";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InternalCheckFailed: return "InternalCheckFailed";
  }
  return "Unknown";
}

bool is_budget_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RefinementOverflow:
    case ErrorKind::AtomOverflow:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::SizeOverflow:
    case ErrorKind::NonPeriodicBase:
    case ErrorKind::NonPeriodic:
      return true;
    default:
      return false;
  }
}

bool is_domain_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::InternalCheckFailed:
      return false;
    default:
      return !is_budget_error(kind);
  }
}

}  // namespace cforge
