#include "eprenorm/error.hpp"

namespace eprenorm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::PolePseudomode: return "PolePseudomode";
    case ErrorCode::NoMarkovianEp: return "NoMarkovianEp";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPhysicalEp: return "NonPhysicalEp";
    case ErrorCode::OrderCheckFailed: return "OrderCheckFailed";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace eprenorm
