#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eprenorm {

enum class ErrorCode {
  InvalidParameter,
  PolePseudomode,
  NoMarkovianEp,
  DegenerateDenominator,
  NoConvergence,
  NonPhysicalEp,
  OrderCheckFailed,
  SingularDenominator,
  StepTooLarge,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the
// message is prefixed with the code name so it can be surfaced verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eprenorm
