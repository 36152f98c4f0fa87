#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace evalkit {

struct GateOp {
  std::string name;
  std::vector<double> params; // radians
  std::vector<Cell> operands;

  bool operator==(const GateOp&) const = default;
};

struct MoveOp {
  Cell src = 0;
  Cell dst = 0;

  bool operator==(const MoveOp&) const = default;
};

using Instruction = std::variant<GateOp, MoveOp>;

/// One line of RSQASM: instructions executed in parallel. No cell appears in
/// more than one operand slot of a stage.
struct Stage {
  std::vector<Instruction> ops;

  bool operator==(const Stage&) const = default;
};

struct Program {
  int versionMajor = 1;
  int versionMinor = 0;
  std::vector<Stage> stages;

  bool operator==(const Program&) const = default;
};

[[nodiscard]] inline std::size_t gateArity(std::string_view name) noexcept {
  return name == "cz" ? 2 : 1;
}

[[nodiscard]] inline std::size_t gateParamCount(std::string_view name) noexcept {
  return (name == "rx" || name == "ry" || name == "rz") ? 1 : 0;
}

[[nodiscard]] inline bool isMove(const Instruction& op) noexcept {
  return std::holds_alternative<MoveOp>(op);
}

/// Cells touched by an instruction, in operand order.
[[nodiscard]] inline std::vector<Cell> cellsOf(const Instruction& op) {
  if (const auto* move = std::get_if<MoveOp>(&op)) {
    return {move->src, move->dst};
  }
  return std::get<GateOp>(op).operands;
}

[[nodiscard]] inline bool references(const Instruction& op, Cell cell) {
  if (const auto* move = std::get_if<MoveOp>(&op)) {
    return move->src == cell || move->dst == cell;
  }
  const auto& operands = std::get<GateOp>(op).operands;
  return std::find(operands.begin(), operands.end(), cell) != operands.end();
}

namespace detail {

class LineCursor {
public:
  LineCursor(std::string_view text, std::size_t line)
      : text_(text), line_(line) {}

  void skipSpace() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  [[nodiscard]] bool atEnd() {
    skipSpace();
    return pos_ >= text_.size();
  }

  [[nodiscard]] bool peek(char c) {
    skipSpace();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c, std::string_view what) {
    if (!peek(c)) {
      fail(ErrorCode::SyntaxError, "expected " + std::string(what));
    }
    ++pos_;
  }

  std::string_view identifier() {
    skipSpace();
    const auto start = pos_;
    auto isStart = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto isBody = [&](char c) { return isStart(c) || (c >= '0' && c <= '9'); };
    if (pos_ >= text_.size() || !isStart(text_[pos_])) {
      fail(ErrorCode::SyntaxError, "expected identifier");
    }
    while (pos_ < text_.size() && isBody(text_[pos_])) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  std::uint64_t unsignedInteger(std::uint64_t max) {
    skipSpace();
    const auto start = pos_;
    std::uint64_t value = 0;
    const auto* first = text_.data() + pos_;
    const auto* last = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::invalid_argument || ptr == first) {
      fail(ErrorCode::SyntaxError, "expected unsigned integer");
    }
    if (ec == std::errc::result_out_of_range || value > max) {
      pos_ = start;
      fail(ErrorCode::SyntaxError, "integer out of range");
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  double real() {
    skipSpace();
    auto first = text_.data() + pos_;
    const auto* last = text_.data() + text_.size();
    // from_chars rejects a leading '+'
    if (first != last && *first == '+') {
      ++first;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first || !std::isfinite(value)) {
      fail(ErrorCode::ParamError, "expected a finite angle");
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  [[nodiscard]] std::size_t column() {
    skipSpace();
    return pos_ + 1;
  }

  [[noreturn]] void fail(ErrorCode code, const std::string& message) {
    throw ParseError(code, line_, pos_ + 1, message);
  }

  [[noreturn]] void failAt(std::size_t column, ErrorCode code,
                           const std::string& message) const {
    throw ParseError(code, line_, column, message);
  }

private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline Cell parseOperand(LineCursor& cur) {
  const auto column = cur.column();
  if (cur.identifier() != "q") {
    cur.failAt(column, ErrorCode::SyntaxError, "operands must have the form q[<cell>]");
  }
  cur.expect('[', "'['");
  const auto cell =
      static_cast<Cell>(cur.unsignedInteger(std::numeric_limits<Cell>::max()));
  cur.expect(']', "']'");
  return cell;
}

inline Instruction parseInstruction(LineCursor& cur, std::set<Cell>& stageCells) {
  const auto nameColumn = cur.column();
  const std::string name(cur.identifier());
  const bool move = name == "move";
  if (!move && !isNativeGate(name)) {
    cur.failAt(nameColumn, ErrorCode::UnknownInstruction,
               "unknown instruction '" + name + "'");
  }

  std::vector<double> params;
  const auto paramColumn = cur.column();
  if (cur.peek('(')) {
    cur.expect('(', "'('");
    if (!cur.peek(')')) {
      params.push_back(cur.real());
      while (cur.peek(',')) {
        cur.expect(',', "','");
        params.push_back(cur.real());
      }
    }
    cur.expect(')', "')'");
  }
  const std::size_t wantParams = move ? 0 : gateParamCount(name);
  if (params.size() != wantParams) {
    cur.failAt(paramColumn, ErrorCode::ParamError,
               "'" + name + "' takes " + std::to_string(wantParams) +
                   " parameter(s), got " + std::to_string(params.size()));
  }

  std::vector<Cell> operands;
  std::vector<std::size_t> columns;
  columns.push_back(cur.column());
  operands.push_back(parseOperand(cur));
  while (cur.peek(',')) {
    cur.expect(',', "','");
    columns.push_back(cur.column());
    operands.push_back(parseOperand(cur));
  }
  const std::size_t wantOperands = move ? 2 : gateArity(name);
  if (operands.size() != wantOperands) {
    cur.failAt(columns.front(), ErrorCode::ArityError,
               "'" + name + "' takes " + std::to_string(wantOperands) +
                   " operand(s), got " + std::to_string(operands.size()));
  }
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (!stageCells.insert(operands[i]).second) {
      cur.failAt(columns[i], ErrorCode::DuplicateCellInStage,
                 "cell " + std::to_string(operands[i]) +
                     " is already used in this stage");
    }
  }
  cur.expect(';', "';' after instruction");

  if (move) {
    return MoveOp{operands[0], operands[1]};
  }
  return GateOp{name, std::move(params), std::move(operands)};
}

inline std::string_view trimLeft(std::string_view s) {
  const auto n = s.find_first_not_of(" \t");
  return n == std::string_view::npos ? std::string_view{} : s.substr(n);
}

inline void appendReal(std::string& out, double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

} // namespace detail

/**
 * Parses RSQASM text. The first non-blank, non-comment line must be the
 * `RSQASM <major>.<minor>;` header; every following non-blank line is one
 * stage. Lines starting with `//` are comments. CRLF is accepted.
 *
 * Throws ParseError (with line and column) on any malformed input; it never
 * aborts on arbitrary bytes.
 */
[[nodiscard]] inline Program parseProgram(std::string_view document) {
  Program program;
  bool headerSeen = false;
  std::size_t lineNo = 0;
  std::size_t start = 0;
  while (start <= document.size()) {
    auto end = document.find('\n', start);
    if (end == std::string_view::npos) {
      end = document.size();
    }
    std::string_view line = document.substr(start, end - start);
    start = end + 1;
    ++lineNo;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    const auto content = detail::trimLeft(line);
    if (content.empty() || content.starts_with("//")) {
      if (end == document.size()) {
        break;
      }
      continue;
    }

    detail::LineCursor cur(line, lineNo);
    if (!headerSeen) {
      const auto column = cur.column();
      if (!content.starts_with("RSQASM") || cur.identifier() != "RSQASM") {
        cur.failAt(column, ErrorCode::MissingHeader,
                   "expected 'RSQASM <major>.<minor>;' header");
      }
      const auto versionColumn = cur.column();
      const auto major = cur.unsignedInteger(1000000);
      cur.expect('.', "'.' in version");
      const auto minor = cur.unsignedInteger(1000000);
      cur.expect(';', "';' after header");
      if (!cur.atEnd()) {
        cur.fail(ErrorCode::SyntaxError, "unexpected text after header");
      }
      if (major != 1) {
        cur.failAt(versionColumn, ErrorCode::UnsupportedVersion,
                   "unsupported RSQASM version " + std::to_string(major) + "." +
                       std::to_string(minor));
      }
      program.versionMajor = static_cast<int>(major);
      program.versionMinor = static_cast<int>(minor);
      headerSeen = true;
    } else {
      Stage stage;
      std::set<Cell> cells;
      while (!cur.atEnd()) {
        stage.ops.push_back(detail::parseInstruction(cur, cells));
      }
      program.stages.push_back(std::move(stage));
    }
    if (end == document.size()) {
      break;
    }
  }
  if (!headerSeen) {
    throw ParseError(ErrorCode::MissingHeader, lineNo == 0 ? 1 : lineNo, 1,
                     "document has no RSQASM header");
  }
  return program;
}

[[nodiscard]] inline std::string serializeInstruction(const Instruction& op) {
  std::string out;
  if (const auto* move = std::get_if<MoveOp>(&op)) {
    out += "move q[" + std::to_string(move->src) + "], q[" +
           std::to_string(move->dst) + "];";
    return out;
  }
  const auto& gate = std::get<GateOp>(op);
  out += gate.name;
  if (!gate.params.empty()) {
    out += '(';
    for (std::size_t i = 0; i < gate.params.size(); ++i) {
      if (i > 0) {
        out += ", ";
      }
      detail::appendReal(out, gate.params[i]);
    }
    out += ')';
  }
  for (std::size_t i = 0; i < gate.operands.size(); ++i) {
    out += i == 0 ? " q[" : ", q[";
    out += std::to_string(gate.operands[i]);
    out += ']';
  }
  out += ';';
  return out;
}

/// Canonical text: LF line endings, instructions of a stage concatenated
/// without separators, shortest round-trip angle formatting.
[[nodiscard]] inline std::string serializeProgram(const Program& program) {
  std::string out = "RSQASM " + std::to_string(program.versionMajor) + "." +
                    std::to_string(program.versionMinor) + ";\n";
  for (const auto& stage : program.stages) {
    for (const auto& op : stage.ops) {
      out += serializeInstruction(op);
    }
    out += '\n';
  }
  return out;
}

} // namespace evalkit
