#include "lexer.hpp"

#include <cctype>
#include <cstdlib>
#include <utility>

namespace rfol::detail {

namespace {

struct Alias {
  std::string_view utf8;
  Tok kind;
};

constexpr Alias kAliases[] = {
    {"∀", Tok::Forall}, {"∃", Tok::Exists}, {"∧", Tok::And},
    {"∨", Tok::Or},     {"¬", Tok::Not},    {"≤", Tok::Le},
    {"≥", Tok::Ge},     {"≠", Tok::Ne},     {"→", Tok::Arrow},
    {"∈", Tok::Ident},  // element-of, treated as the keyword `in`
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

std::string describe(const Token& tok) {
  if (tok.kind == Tok::End) return "end of input";
  return "'" + tok.text + "'";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, std::size_t len) {
    Token t{kind, std::string(text.substr(i, len)), 0.0, SourcePos{line, col}};
    out.push_back(std::move(t));
    advance(len);
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (ident_start(c)) {
      std::size_t len = 1;
      while (i + len < text.size() && ident_char(text[i + len])) ++len;
      push(Tok::Ident, len);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::string buf(text.substr(i));
      char* end = nullptr;
      double v = std::strtod(buf.c_str(), &end);
      std::size_t len = static_cast<std::size_t>(end - buf.c_str());
      Token t{Tok::Number, std::string(text.substr(i, len)), v, SourcePos{line, col}};
      out.push_back(std::move(t));
      advance(len);
      continue;
    }
    if (c == '"') {
      std::size_t len = 1;
      while (i + len < text.size() && text[i + len] != '"' && text[i + len] != '\n') ++len;
      if (i + len >= text.size() || text[i + len] != '"') {
        throw Error(ErrorCode::SyntaxError, "unterminated string", SourcePos{line, col});
      }
      Token t{Tok::String, std::string(text.substr(i + 1, len - 1)), 0.0, SourcePos{line, col}};
      out.push_back(std::move(t));
      advance(len + 1);
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "<=") { push(Tok::Le, 2); continue; }
    if (two == ">=") { push(Tok::Ge, 2); continue; }
    if (two == "!=") { push(Tok::Ne, 2); continue; }
    if (two == "==") { push(Tok::Eq, 2); continue; }
    if (two == "->") { push(Tok::Arrow, 2); continue; }
    if (two == "||") { push(Tok::Norm, 2); continue; }
    bool matched = true;
    switch (c) {
    case '(': push(Tok::LParen, 1); break;
    case ')': push(Tok::RParen, 1); break;
    case '[': push(Tok::LBracket, 1); break;
    case ']': push(Tok::RBracket, 1); break;
    case ',': push(Tok::Comma, 1); break;
    case ':': push(Tok::Colon, 1); break;
    case ';': push(Tok::Semicolon, 1); break;
    case '+': push(Tok::Plus, 1); break;
    case '-': push(Tok::Minus, 1); break;
    case '*': push(Tok::Star, 1); break;
    case '/': push(Tok::Slash, 1); break;
    case '<': push(Tok::Lt, 1); break;
    case '>': push(Tok::Gt, 1); break;
    case '=': push(Tok::Eq, 1); break;
    default: matched = false;
    }
    if (matched) continue;
    bool aliased = false;
    for (const auto& alias : kAliases) {
      if (text.substr(i, alias.utf8.size()) == alias.utf8) {
        Token t{alias.kind, alias.kind == Tok::Ident ? "in" : std::string(alias.utf8), 0.0,
                SourcePos{line, col}};
        out.push_back(std::move(t));
        advance(alias.utf8.size());
        aliased = true;
        break;
      }
    }
    if (aliased) continue;
    throw Error(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'",
                SourcePos{line, col});
  }
  out.push_back(Token{Tok::End, "", 0.0, SourcePos{line, col}});
  return out;
}

} // namespace rfol::detail
