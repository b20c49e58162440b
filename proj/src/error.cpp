#include "rfol/error.hpp"

namespace rfol {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::SyntaxError: return "SyntaxError";
  case ErrorCode::UndeclaredSignal: return "UndeclaredSignal";
  case ErrorCode::Condition1Violation: return "Condition1Violation";
  case ErrorCode::Condition2Violation: return "Condition2Violation";
  case ErrorCode::UndefinedSignalValue: return "UndefinedSignalValue";
  case ErrorCode::UndefinedFormula: return "UndefinedFormula";
  case ErrorCode::NegativeIndexReachable: return "NegativeIndexReachable";
  case ErrorCode::NonConstantBoundUnsupported: return "NonConstantBoundUnsupported";
  case ErrorCode::MixedIndexPredicate: return "MixedIndexPredicate";
  case ErrorCode::NotOnlineCheckable: return "NotOnlineCheckable";
  case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
  case ErrorCode::MissingSignal: return "MissingSignal";
  case ErrorCode::DomainIncomplete: return "DomainIncomplete";
  case ErrorCode::TraceFormat: return "TraceFormat";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           const std::optional<SourcePos>& pos) {
  std::string out(to_string(code));
  if (pos) {
    out += " at " + std::to_string(pos->line) + ":" + std::to_string(pos->column);
  }
  out += ": ";
  out += message;
  return out;
}

} // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<SourcePos> pos)
    : std::runtime_error(format_message(code, message, pos)), code_(code), pos_(pos),
      detail_(message) {}

} // namespace rfol
