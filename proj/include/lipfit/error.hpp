#pragma once

#include <stdexcept>
#include <string>

namespace lipfit {

enum class ErrorCode {
  InvalidArgument = 1,
  DegenerateExtent,
  DisconnectedDomain,
  NonFiniteSample,
  GridMismatch,
  EmptySourceSet,
  UnmaskedSource,
  IndexOutOfRange,
  UnsupportedExponent,
  NonConvexValueFunction,
  InfeasibleInput,
  InfeasibleSegment,
  NonFiniteEnergy,
  LineSearchStalled,
  MaxIterExceeded,
  Io,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the C
// layer maps them one-to-one onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace lipfit
