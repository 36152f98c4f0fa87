#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace evalkit {

/// Every failure the library reports carries one of these codes. The CLI maps
/// them onto exit status 2 and prints the code name next to the message.
enum class ErrorCode {
  // architecture documents
  MalformedDocument,
  SchemaMismatch,
  MissingField,
  InvalidValue,
  // RSQASM text
  MissingHeader,
  UnsupportedVersion,
  UnknownInstruction,
  ArityError,
  ParamError,
  DuplicateCellInStage,
  SyntaxError,
  // grid simulation
  CellOutOfRange,
  GateOnEmptyCell,
  MoveFromEmptyCell,
  MoveToOccupiedCell,
  IllegalStage,
  // evaluation
  UnknownGate,
  NegativeIdleTime,
  CoherenceBudgetExceeded,
  InvalidInput,
  // normalization / ingest
  IllegalInput,
  UnsupportedConstruct,
  TooManyQubits,
};

[[nodiscard]] constexpr std::string_view toString(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::MalformedDocument:
    return "MalformedDocument";
  case ErrorCode::SchemaMismatch:
    return "SchemaMismatch";
  case ErrorCode::MissingField:
    return "MissingField";
  case ErrorCode::InvalidValue:
    return "InvalidValue";
  case ErrorCode::MissingHeader:
    return "MissingHeader";
  case ErrorCode::UnsupportedVersion:
    return "UnsupportedVersion";
  case ErrorCode::UnknownInstruction:
    return "UnknownInstruction";
  case ErrorCode::ArityError:
    return "ArityError";
  case ErrorCode::ParamError:
    return "ParamError";
  case ErrorCode::DuplicateCellInStage:
    return "DuplicateCellInStage";
  case ErrorCode::SyntaxError:
    return "SyntaxError";
  case ErrorCode::CellOutOfRange:
    return "CellOutOfRange";
  case ErrorCode::GateOnEmptyCell:
    return "GateOnEmptyCell";
  case ErrorCode::MoveFromEmptyCell:
    return "MoveFromEmptyCell";
  case ErrorCode::MoveToOccupiedCell:
    return "MoveToOccupiedCell";
  case ErrorCode::IllegalStage:
    return "IllegalStage";
  case ErrorCode::UnknownGate:
    return "UnknownGate";
  case ErrorCode::NegativeIdleTime:
    return "NegativeIdleTime";
  case ErrorCode::CoherenceBudgetExceeded:
    return "CoherenceBudgetExceeded";
  case ErrorCode::InvalidInput:
    return "InvalidInput";
  case ErrorCode::IllegalInput:
    return "IllegalInput";
  case ErrorCode::UnsupportedConstruct:
    return "UnsupportedConstruct";
  case ErrorCode::TooManyQubits:
    return "TooManyQubits";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(toString(code)) + ": " + message),
        code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Text-level failure with a 1-based source position.
class ParseError : public Error {
public:
  ParseError(ErrorCode code, std::size_t line, std::size_t column,
             const std::string& message)
      : Error(code, "line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + message),
        line_(line), column_(column) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

} // namespace evalkit
