#include "seedforge/errors.hpp"

namespace seedforge {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
    case ErrorCode::auth: return "auth";
    case ErrorCode::transport: return "transport";
    case ErrorCode::script_exhausted: return "script_exhausted";
    case ErrorCode::cassette_miss: return "cassette_miss";
    case ErrorCode::size_limit: return "size_limit";
    case ErrorCode::empty_evaluation: return "empty_evaluation";
    case ErrorCode::proposal_exhausted: return "proposal_exhausted";
    case ErrorCode::regeneration_incomplete: return "regeneration_incomplete";
    case ErrorCode::extraction_parse: return "extraction_parse";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace seedforge
