#include "ecl/error.hpp"

namespace ecl {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::DuplicateFrequency: return "DuplicateFrequency";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NonUnimodal: return "NonUnimodal";
    case ErrorKind::NoZeroCrossing: return "NoZeroCrossing";
    case ErrorKind::MultipleCrossings: return "MultipleCrossings";
    case ErrorKind::InsufficientPlateau: return "InsufficientPlateau";
    case ErrorKind::RatioOutOfDomain: return "RatioOutOfDomain";
    case ErrorKind::NegativeLiftoff: return "NegativeLiftoff";
    case ErrorKind::FitDiverged: return "FitDiverged";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return 3;
    case ErrorKind::Validation: return 4;
    case ErrorKind::Parse: return 5;
    case ErrorKind::Schema: return 6;
    case ErrorKind::DuplicateFrequency: return 7;
    case ErrorKind::GridMismatch: return 8;
    case ErrorKind::ModeMismatch: return 9;
    case ErrorKind::NonConvergence: return 10;
    case ErrorKind::NonUnimodal: return 11;
    case ErrorKind::NoZeroCrossing: return 12;
    case ErrorKind::MultipleCrossings: return 13;
    case ErrorKind::InsufficientPlateau: return 14;
    case ErrorKind::RatioOutOfDomain: return 15;
    case ErrorKind::NegativeLiftoff: return 16;
    case ErrorKind::FitDiverged: return 17;
  }
  return 1;
}

}  // namespace ecl
