#include "lemnika/error.hpp"

namespace lemnika {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSubharmonic: return "NonSubharmonic";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::TailFree: return "TailFree";
    case ErrorCode::NoSuchR: return "NoSuchR";
    case ErrorCode::EmptyCell: return "EmptyCell";
    case ErrorCode::NonIntegerPieces: return "NonIntegerPieces";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::SeparationFailure: return "SeparationFailure";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::OriginUndefined: return "OriginUndefined";
    case ErrorCode::DegreeExceeded: return "DegreeExceeded";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::DegenerateLeading: return "DegenerateLeading";
    case ErrorCode::CommonFactorSuspected: return "CommonFactorSuspected";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace lemnika
