#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"
#include "evalkit/rsqasm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evalkit {

/// A gate application on logical qubits, or a barrier (name "barrier").
struct FlatGate {
  std::string name;
  std::vector<double> params;
  std::vector<std::uint32_t> qubits;

  [[nodiscard]] bool isBarrier() const noexcept { return name == "barrier"; }
  bool operator==(const FlatGate&) const = default;
};

struct FlatCircuit {
  std::size_t qubitCount = 0;
  std::vector<FlatGate> ops;

  [[nodiscard]] std::size_t gateCount() const {
    return static_cast<std::size_t>(
        std::count_if(ops.begin(), ops.end(),
                      [](const FlatGate& g) { return !g.isBarrier(); }));
  }
};

namespace detail {

struct QasmToken {
  enum class Kind { Identifier, Number, String, Symbol, End } kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class QasmLexer {
public:
  explicit QasmLexer(std::string_view src) : src_(src) { advance(); }

  [[nodiscard]] const QasmToken& peek() const { return current_; }

  QasmToken next() {
    QasmToken out = current_;
    advance();
    return out;
  }

  [[nodiscard]] bool isSymbol(std::string_view s) const {
    return current_.kind == QasmToken::Kind::Symbol && current_.text == s;
  }

  void expectSymbol(std::string_view s) {
    if (!isSymbol(s)) {
      fail(ErrorCode::SyntaxError, "expected '" + std::string(s) + "'");
    }
    advance();
  }

  std::string expectIdentifier() {
    if (current_.kind != QasmToken::Kind::Identifier) {
      fail(ErrorCode::SyntaxError, "expected identifier");
    }
    return next().text;
  }

  std::uint32_t expectIndex() {
    if (current_.kind != QasmToken::Kind::Number) {
      fail(ErrorCode::SyntaxError, "expected qubit index");
    }
    std::uint32_t value = 0;
    const auto& t = current_.text;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      fail(ErrorCode::SyntaxError, "invalid qubit index '" + t + "'");
    }
    advance();
    return value;
  }

  [[noreturn]] void fail(ErrorCode code, const std::string& message) const {
    throw ParseError(code, current_.line, current_.column, message);
  }

private:
  void advance() {
    skipBlank();
    QasmToken tok{QasmToken::Kind::End, "", line_, column_};
    if (pos_ >= src_.size()) {
      current_ = tok;
      return;
    }
    const char c = src_[pos_];
    const auto isAlpha = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_';
    };
    const auto isDigit = [](char ch) { return ch >= '0' && ch <= '9'; };
    if (isAlpha(c)) {
      tok.kind = QasmToken::Kind::Identifier;
      while (pos_ < src_.size() && (isAlpha(src_[pos_]) || isDigit(src_[pos_]))) {
        take(tok);
      }
    } else if (isDigit(c) || (c == '.' && pos_ + 1 < src_.size() &&
                              isDigit(src_[pos_ + 1]))) {
      tok.kind = QasmToken::Kind::Number;
      while (pos_ < src_.size() && (isDigit(src_[pos_]) || src_[pos_] == '.')) {
        take(tok);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        take(tok);
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
          take(tok);
        }
        while (pos_ < src_.size() && isDigit(src_[pos_])) {
          take(tok);
        }
      }
    } else if (c == '"') {
      tok.kind = QasmToken::Kind::String;
      bump();
      while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
        take(tok);
      }
      if (pos_ >= src_.size() || src_[pos_] != '"') {
        throw ParseError(ErrorCode::SyntaxError, tok.line, tok.column,
                         "unterminated string");
      }
      bump();
    } else {
      tok.kind = QasmToken::Kind::Symbol;
      if (src_.substr(pos_, 2) == "->" || src_.substr(pos_, 2) == "==") {
        take(tok);
      }
      take(tok);
    }
    current_ = tok;
  }

  void skipBlank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') {
          bump();
        }
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void take(QasmToken& tok) {
    tok.text += src_[pos_];
    bump();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  QasmToken current_{QasmToken::Kind::End, "", 1, 1};
};

class FlatQasmParser {
public:
  explicit FlatQasmParser(std::string_view src) : lex_(src) {}

  FlatCircuit parse() {
    bool first = true;
    while (lex_.peek().kind != QasmToken::Kind::End) {
      statement(first);
      first = false;
    }
    if (!declared_) {
      circuit_.qubitCount = implicitCount_;
    }
    return std::move(circuit_);
  }

private:
  void statement(bool first) {
    const auto& tok = lex_.peek();
    if (tok.kind != QasmToken::Kind::Identifier) {
      lex_.fail(ErrorCode::SyntaxError, "expected a statement");
    }
    const std::string keyword = tok.text;
    if (keyword == "OPENQASM") {
      if (!first) {
        lex_.fail(ErrorCode::SyntaxError, "OPENQASM must be the first statement");
      }
      lex_.next();
      const auto version = lex_.peek();
      if (version.kind != QasmToken::Kind::Number) {
        lex_.fail(ErrorCode::SyntaxError, "expected version number");
      }
      if (!version.text.starts_with("2")) {
        lex_.fail(ErrorCode::UnsupportedConstruct,
                  "only OPENQASM 2 input is supported");
      }
      lex_.next();
      lex_.expectSymbol(";");
    } else if (keyword == "include") {
      lex_.next();
      const auto file = lex_.peek();
      if (file.kind != QasmToken::Kind::String) {
        lex_.fail(ErrorCode::SyntaxError, "expected file name");
      }
      if (file.text != "qelib1.inc") {
        lex_.fail(ErrorCode::UnsupportedConstruct,
                  "include of '" + file.text + "' is not supported");
      }
      lex_.next();
      lex_.expectSymbol(";");
    } else if (keyword == "qreg") {
      if (declared_ || !register_.empty()) {
        lex_.fail(ErrorCode::UnsupportedConstruct,
                  "only a single qreg declared before any gate is supported");
      }
      lex_.next();
      register_ = lex_.expectIdentifier();
      lex_.expectSymbol("[");
      circuit_.qubitCount = lex_.expectIndex();
      lex_.expectSymbol("]");
      lex_.expectSymbol(";");
      declared_ = true;
    } else if (keyword == "creg" || keyword == "measure" || keyword == "reset" ||
               keyword == "if" || keyword == "gate" || keyword == "opaque") {
      lex_.fail(ErrorCode::UnsupportedConstruct,
                "'" + keyword + "' is not supported");
    } else if (keyword == "barrier") {
      lex_.next();
      FlatGate barrier{"barrier", {}, arguments(true)};
      lex_.expectSymbol(";");
      circuit_.ops.push_back(std::move(barrier));
    } else {
      gate();
    }
  }

  void gate() {
    const auto nameTok = lex_.peek();
    const std::string name = lex_.expectIdentifier();
    if (!isNativeGate(name)) {
      throw ParseError(ErrorCode::UnsupportedConstruct, nameTok.line,
                       nameTok.column,
                       "gate '" + name + "' is not in the native set");
    }
    std::vector<double> params;
    if (lex_.isSymbol("(")) {
      lex_.next();
      params.push_back(expression());
      while (lex_.isSymbol(",")) {
        lex_.next();
        params.push_back(expression());
      }
      lex_.expectSymbol(")");
    }
    if (params.size() != gateParamCount(name)) {
      throw ParseError(ErrorCode::SyntaxError, nameTok.line, nameTok.column,
                       "'" + name + "' takes " +
                           std::to_string(gateParamCount(name)) + " parameter(s)");
    }
    auto qubits = arguments(false);
    if (qubits.size() != gateArity(name)) {
      throw ParseError(ErrorCode::SyntaxError, nameTok.line, nameTok.column,
                       "'" + name + "' takes " + std::to_string(gateArity(name)) +
                           " qubit(s)");
    }
    if (qubits.size() == 2 && qubits[0] == qubits[1]) {
      throw ParseError(ErrorCode::SyntaxError, nameTok.line, nameTok.column,
                       "repeated qubit operand");
    }
    lex_.expectSymbol(";");
    circuit_.ops.push_back({name, std::move(params), std::move(qubits)});
  }

  /// `q[i], q[j], ...`; a bare register name is accepted for barriers and
  /// expands to every qubit.
  std::vector<std::uint32_t> arguments(bool allowWholeRegister) {
    std::vector<std::uint32_t> out;
    while (true) {
      const auto regTok = lex_.peek();
      const std::string reg = lex_.expectIdentifier();
      if (register_.empty()) {
        register_ = reg;
      } else if (reg != register_) {
        throw ParseError(ErrorCode::UnsupportedConstruct, regTok.line,
                         regTok.column, "unknown register '" + reg + "'");
      }
      if (lex_.isSymbol("[")) {
        lex_.next();
        const auto indexTok = lex_.peek();
        const auto index = lex_.expectIndex();
        lex_.expectSymbol("]");
        if (declared_ && index >= circuit_.qubitCount) {
          throw ParseError(ErrorCode::SyntaxError, indexTok.line,
                           indexTok.column,
                           "qubit index " + std::to_string(index) +
                               " outside register of size " +
                               std::to_string(circuit_.qubitCount));
        }
        implicitCount_ = std::max<std::size_t>(implicitCount_, index + 1);
        out.push_back(index);
      } else if (!allowWholeRegister) {
        lex_.fail(ErrorCode::SyntaxError, "expected '['");
      } else {
        // whole register: an empty list means every qubit
        return {};
      }
      if (!lex_.isSymbol(",")) {
        return out;
      }
      lex_.next();
    }
  }

  double expression() {
    double value = term();
    while (lex_.isSymbol("+") || lex_.isSymbol("-")) {
      const bool plus = lex_.next().text == "+";
      const double rhs = term();
      value = plus ? value + rhs : value - rhs;
    }
    return value;
  }

  double term() {
    double value = unary();
    while (lex_.isSymbol("*") || lex_.isSymbol("/")) {
      const bool times = lex_.next().text == "*";
      const double rhs = unary();
      value = times ? value * rhs : value / rhs;
    }
    if (!std::isfinite(value)) {
      lex_.fail(ErrorCode::SyntaxError, "non-finite parameter");
    }
    return value;
  }

  double unary() {
    if (lex_.isSymbol("-")) {
      lex_.next();
      return -unary();
    }
    if (lex_.isSymbol("+")) {
      lex_.next();
      return unary();
    }
    if (lex_.isSymbol("(")) {
      lex_.next();
      const double v = expression();
      lex_.expectSymbol(")");
      return v;
    }
    const auto tok = lex_.peek();
    if (tok.kind == QasmToken::Kind::Identifier && tok.text == "pi") {
      lex_.next();
      return std::numbers::pi;
    }
    if (tok.kind == QasmToken::Kind::Number) {
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
        lex_.fail(ErrorCode::SyntaxError, "invalid number '" + tok.text + "'");
      }
      lex_.next();
      return v;
    }
    lex_.fail(ErrorCode::SyntaxError, "expected a parameter expression");
  }

  QasmLexer lex_;
  FlatCircuit circuit_;
  std::string register_;
  bool declared_ = false;
  std::size_t implicitCount_ = 0;
};

} // namespace detail

/**
 * Reads the flat OpenQASM 2 subset produced by a native-gate transpilation:
 * optional `OPENQASM 2.0;` and `include "qelib1.inc";`, at most one qreg,
 * gates from {cz, rx, ry, rz, h, s, t} and barriers. Barriers are kept as
 * inert markers and never count as gates. Without a qreg the register is
 * inferred from the first operand and sized by the largest index used.
 */
[[nodiscard]] inline FlatCircuit parseFlatQasm(std::string_view document) {
  return detail::FlatQasmParser(document).parse();
}

enum class Packing { OnePerStage, Greedy };

/**
 * Places logical qubit i on the i-th occupied cell of `spec` in row-major
 * order and emits one stage per gate, or packs greedily: each gate lands in
 * the stage right after the last one touching any of its qubits. A barrier
 * aligns its qubits so no gate moves ahead of it. No moves are emitted.
 */
[[nodiscard]] inline Program toRsqasm(const FlatCircuit& circuit,
                                      const ArchitectureSpec& spec,
                                      Packing packing) {
  if (circuit.qubitCount > spec.qubitCount()) {
    throw Error(ErrorCode::TooManyQubits,
                "circuit uses " + std::to_string(circuit.qubitCount) +
                    " qubits, architecture places " +
                    std::to_string(spec.qubitCount()));
  }
  std::vector<Cell> cells;
  for (const auto& q : spec.qubits) {
    cells.push_back(spec.cellOf(q));
  }
  std::sort(cells.begin(), cells.end());

  Program program;
  std::vector<std::int64_t> last(circuit.qubitCount, -1);
  for (const auto& op : circuit.ops) {
    if (op.isBarrier()) {
      if (packing == Packing::Greedy) {
        std::vector<std::uint32_t> span = op.qubits;
        if (span.empty()) {
          for (std::uint32_t q = 0; q < circuit.qubitCount; ++q) {
            span.push_back(q);
          }
        }
        std::int64_t fence = -1;
        for (const auto q : span) {
          fence = std::max(fence, last[q]);
        }
        for (const auto q : span) {
          last[q] = fence;
        }
      }
      continue;
    }
    GateOp gate{op.name, op.params, {}};
    for (const auto q : op.qubits) {
      gate.operands.push_back(cells[q]);
    }
    std::size_t target = program.stages.size();
    if (packing == Packing::Greedy) {
      std::int64_t after = -1;
      for (const auto q : op.qubits) {
        after = std::max(after, last[q]);
      }
      target = static_cast<std::size_t>(after + 1);
    }
    if (target == program.stages.size()) {
      program.stages.emplace_back();
    }
    program.stages[target].ops.emplace_back(std::move(gate));
    for (const auto q : op.qubits) {
      last[q] = static_cast<std::int64_t>(target);
    }
  }
  return program;
}

} // namespace evalkit
