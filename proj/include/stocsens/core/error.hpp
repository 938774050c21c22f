#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stocsens {

enum class ErrorKind {
  kInvalidArgument,
  kUnsupported,
  kSingularRiccati,
  kIntegrationFailure,
  kConvergenceFailure,
  kDegenerateProblem,
  kEllipticity,
  kQualification,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `kind()` is stable and is what the CLI maps to
/// exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

/// Compact rendering of a double for messages (%.6g).
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::kInvalidArgument, message);
}

}  // namespace stocsens
