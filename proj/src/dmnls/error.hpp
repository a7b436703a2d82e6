#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmnls {

enum class ErrorCode {
  InvalidArgument = 1,
  Config = 2,
  Io = 3,
  Solver = 4,
  Wraparound = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

// Non-fatal diagnostics. The default sink writes "warning: ..." to stderr.
using WarningSink = void (*)(std::string_view message, void* user);
void set_warning_sink(WarningSink sink, void* user);
void warn(std::string_view message);

}  // namespace dmnls
