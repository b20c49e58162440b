#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rfol {

/// Position inside a source text, 1-based.
struct SourcePos {
  int line = 1;
  int column = 1;
};

enum class ErrorCode {
  SyntaxError,
  UndeclaredSignal,
  Condition1Violation,
  Condition2Violation,
  UndefinedSignalValue,
  UndefinedFormula,
  NegativeIndexReachable,
  NonConstantBoundUnsupported,
  MixedIndexPredicate,
  NotOnlineCheckable,
  NonMonotonicTime,
  MissingSignal,
  DomainIncomplete,
  TraceFormat,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::optional<SourcePos> pos = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<SourcePos>& pos() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  std::optional<SourcePos> pos_;
  std::string detail_;
};

} // namespace rfol
