// Error taxonomy shared by the library and the command-line front end.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecl {

enum class ErrorKind {
  Validation,
  Parse,
  Schema,
  DuplicateFrequency,
  GridMismatch,
  ModeMismatch,
  NonConvergence,
  NonUnimodal,
  NoZeroCrossing,
  MultipleCrossings,
  InsufficientPlateau,
  RatioOutOfDomain,
  NegativeLiftoff,
  FitDiverged,
  Io,
};

/// Machine-readable class name, e.g. "NoZeroCrossing".
std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Distinct process exit code per error class (0 and 1 are reserved).
int exit_code_for(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ecl
