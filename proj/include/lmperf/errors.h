#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmperf {

enum class ErrorCode {
  kDimensionMismatch,
  kNonPositiveField,
  kMissingBlockSize,
  kInvalidField,
  kUnknownField,
  kParseError,
  kUnsupportedAcceleration,
  kNonPositiveIntensity,
  kInsufficientPoints,
  kRegimeViolation,
  kKeyMismatch,
  kEmptyRowSet,
  kIoFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Issue {
  ErrorCode code;
  std::string message;
};

// Carries every violated invariant, not just the first one found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);

  const std::vector<Issue>& issues() const { return issues_; }
  bool has(ErrorCode code) const;

 private:
  std::vector<Issue> issues_;
};

}  // namespace lmperf
