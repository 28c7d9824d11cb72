#include "isoline/error.hpp"

namespace isoline {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
#define ISOLINE_X(name, value, cat) \
  case ErrorCode::name:             \
    return #name;
    ISOLINE_ERROR_CODES(ISOLINE_X)
#undef ISOLINE_X
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) noexcept {
  constexpr auto P = ErrorCategory::Parse;
  constexpr auto R = ErrorCategory::Processing;
  constexpr auto I = ErrorCategory::Io;
  constexpr auto U = ErrorCategory::Usage;
  switch (code) {
#define ISOLINE_X(name, value, cat) \
  case ErrorCode::name:             \
    return cat;
    ISOLINE_ERROR_CODES(ISOLINE_X)
#undef ISOLINE_X
  }
  return R;
}

}  // namespace isoline
