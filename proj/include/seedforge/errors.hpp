#pragma once

#include <stdexcept>
#include <string>

namespace seedforge {

enum class ErrorCode {
  invalid_argument,
  parse,
  io,
  auth,
  transport,
  script_exhausted,
  cassette_miss,
  size_limit,
  empty_evaluation,
  proposal_exhausted,
  regeneration_incomplete,
  extraction_parse,
  unsupported,
  internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace seedforge
