#pragma once

#include <stdexcept>
#include <string>

namespace lra {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain = 2,
  Convergence = 3,
  Io = 4,
  Config = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace lra
