#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kornkit {

enum class ErrorKind {
  NonFinite,
  DeterminantTooSmall,
  GridTooSmall,
  GridTooLarge,
  DimensionMismatch,
  UnknownKind,
  NonFiniteCoefficient,
  NotIntegrable,
  FaceMismatch,
  DisconnectedDomain,
  SeedOutsideDomain,
  EmptyBoundaryPatch,
  EigensolveFailed,
  FormatError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (the CLI in particular) can map them to machine-readable output.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kornkit
