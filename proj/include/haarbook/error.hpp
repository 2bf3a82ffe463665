#pragma once

#include <stdexcept>
#include <string>

namespace haarbook {

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch = 2,
  not_positive_definite = 3,
  improper_posterior = 4,
  envelope_unavailable = 5,
  io = 6,
  config = 7,
};

// Every failure inside the library is reported through this type; the C API
// maps the code onto hb_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require_dims(std::size_t expected, std::size_t got,
                         const char* what) {
  if (expected != got) {
    fail(ErrorCode::dimension_mismatch,
         std::string(what) + ": expected dimension " +
             std::to_string(expected) + ", got " + std::to_string(got));
  }
}

}  // namespace haarbook
