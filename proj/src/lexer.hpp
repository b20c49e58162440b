#pragma once

// Tokenizer shared by the RFOL and STL front ends.

#include "rfol/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rfol::detail {

enum class Tok {
  Ident,
  Number,
  String,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Semicolon,
  Plus,
  Minus,
  Star,
  Slash,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  Arrow,
  Norm,
  // Unicode aliases map to the keyword tokens below.
  Forall,
  Exists,
  And,
  Or,
  Not,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

std::vector<Token> tokenize(std::string_view text);

std::string describe(const Token& tok);

/// Cursor over a token vector with save/restore for backtracking.
class TokenStream {
public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  bool accept(Tok kind) {
    if (!at(kind)) return false;
    next();
    return true;
  }
  bool accept_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    next();
    return true;
  }
  const Token& expect(Tok kind, std::string_view what) {
    if (!at(kind)) fail("expected " + std::string(what) + ", found " + describe(peek()));
    return next();
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) {
      fail("expected '" + std::string(kw) + "', found " + describe(peek()));
    }
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::SyntaxError, message, peek().pos);
  }

  std::size_t mark() const { return pos_; }
  void reset(std::size_t mark) { pos_ = mark; }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace rfol::detail
