#pragma once

#include <stdexcept>
#include <string>

namespace lskum {

// Error categories exposed 1:1 through the C API status codes.
enum class ErrorCode {
  argument = 1,    // bad argument / precondition violation
  parse = 2,       // malformed grid or config text
  io = 3,          // file system failure
  validation = 4,  // cloud failed stencil validation
  singular = 5,    // singular least-squares stencil at runtime
  positivity = 6,  // non-physical state (rho or p <= 0)
  config = 7,      // inconsistent solver configuration
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace lskum
