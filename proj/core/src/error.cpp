#include "kornkit/error.hpp"

namespace kornkit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DeterminantTooSmall: return "DeterminantTooSmall";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ErrorKind::NotIntegrable: return "NotIntegrable";
    case ErrorKind::FaceMismatch: return "FaceMismatch";
    case ErrorKind::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorKind::SeedOutsideDomain: return "SeedOutsideDomain";
    case ErrorKind::EmptyBoundaryPatch: return "EmptyBoundaryPatch";
    case ErrorKind::EigensolveFailed: return "EigensolveFailed";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace kornkit
