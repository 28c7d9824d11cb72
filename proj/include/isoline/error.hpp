#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "isoline/error_codes.h"

namespace isoline {

enum class ErrorCode : int {
#define ISOLINE_X(name, value, cat) name = value,
  ISOLINE_ERROR_CODES(ISOLINE_X)
#undef ISOLINE_X
};

enum class ErrorCategory { Parse, Processing, Io, Usage };

std::string_view error_name(ErrorCode code) noexcept;
ErrorCategory error_category(ErrorCode code) noexcept;

/// Every module error surfaces as this exception; the code names the
/// failure class and what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace isoline
