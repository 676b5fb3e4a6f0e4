#pragma once

#include <stdexcept>
#include <string>

namespace qsafe {

enum class ErrorCode {
  InvalidArgument,   // bad dimensions, non-finite input, bad config value
  ParseError,        // malformed network file or config file
  IoError,           // missing file/directory, unreadable stream
  EmptySet,          // operation needs a nonempty polytope
  DegenerateBasis,   // witness extraction hit a rank-deficient basis
  LpFailure,         // solver exceeded iteration budget / numerical breakdown
  MissingNetwork,    // requested network slot not loaded
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qsafe
