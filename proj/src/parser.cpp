#include "rfol/parser.hpp"

#include "lexer.hpp"
#include "rfol/ops.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rfol {

using detail::Tok;
using detail::Token;
using detail::TokenStream;

std::set<std::string> Declarations::scalar_signals() const {
  std::set<std::string> out;
  for (const auto& s : signals) {
    if (s.is_vector()) {
      out.insert(s.components.begin(), s.components.end());
    } else {
      out.insert(s.name);
    }
  }
  return out;
}

const SignalDecl* Declarations::find(std::string_view name) const {
  for (const auto& s : signals) {
    if (s.name == name) return &s;
  }
  for (const auto& s : signals) {
    for (const auto& c : s.components) {
      if (c == name) return &s;
    }
  }
  return nullptr;
}

namespace {

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "forall", "exists", "in",  "and", "or",  "not", "signal", "domain", "req", "const",
      "neg",    "abs",    "sin", "cos", "sqrt", "exp", "min",   "max",    "pow"};
  return words;
}

std::optional<UnaryOp> unary_function(std::string_view name) {
  if (name == "neg") return UnaryOp::Neg;
  if (name == "abs") return UnaryOp::Abs;
  if (name == "sin") return UnaryOp::Sin;
  if (name == "cos") return UnaryOp::Cos;
  if (name == "sqrt") return UnaryOp::Sqrt;
  if (name == "exp") return UnaryOp::Exp;
  return std::nullopt;
}

std::optional<BinaryOp> binary_function(std::string_view name) {
  if (name == "min") return BinaryOp::Min;
  if (name == "max") return BinaryOp::Max;
  if (name == "pow") return BinaryOp::Pow;
  return std::nullopt;
}

using Vec = std::vector<SignalTermPtr>;

class FormulaParser {
public:
  FormulaParser(TokenStream& ts, const Declarations& decls) : ts_(ts), decls_(decls) {}

  FormulaPtr formula() { return implication(); }

  double constant() { return const_expr(); }

private:
  bool at_forall() const { return ts_.at(Tok::Forall) || ts_.at_keyword("forall"); }
  bool at_exists() const { return ts_.at(Tok::Exists) || ts_.at_keyword("exists"); }
  bool accept_and() { return ts_.accept(Tok::And) || ts_.accept_keyword("and"); }
  bool accept_or() { return ts_.accept(Tok::Or) || ts_.accept_keyword("or"); }
  bool accept_not() { return ts_.accept(Tok::Not) || ts_.accept_keyword("not"); }

  // p -> q desugars to neg(p) or q.
  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (ts_.accept(Tok::Arrow)) {
      FormulaPtr rhs = implication();
      return disj(negate(lhs), rhs);
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (accept_or()) lhs = disj(lhs, conjunction());
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = negation();
    while (accept_and()) lhs = conj(lhs, negation());
    return lhs;
  }

  FormulaPtr negation() {
    if (accept_not()) return negate(negation());
    return atom();
  }

  FormulaPtr atom() {
    if (at_forall() || at_exists()) return quantifier();
    if (ts_.at(Tok::LParen)) {
      // Either a parenthesized formula or a predicate whose signal term starts
      // with '('. Try the predicate first and backtrack.
      auto mark = ts_.mark();
      try {
        return predicate_formula();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SyntaxError) throw;
        ts_.reset(mark);
      }
      ts_.expect(Tok::LParen, "'('");
      FormulaPtr inner = formula();
      ts_.expect(Tok::RParen, "')'");
      return inner;
    }
    return predicate_formula();
  }

  FormulaPtr quantifier() {
    Quantifier q = at_forall() ? Quantifier::Forall : Quantifier::Exists;
    ts_.next();
    const Token& var = ts_.expect(Tok::Ident, "time variable");
    if (reserved_words().count(var.text)) ts_.fail("'" + var.text + "' is a reserved word");
    ts_.expect_keyword("in");
    Interval iv = interval();
    ts_.expect(Tok::Colon, "':'");
    FormulaPtr body = formula();
    return quantified(q, var.text, iv, body);
  }

  Interval interval() {
    Interval iv;
    if (ts_.accept(Tok::LBracket)) {
      iv.lower_closed = true;
    } else if (ts_.accept(Tok::LParen)) {
      iv.lower_closed = false;
    } else {
      ts_.fail("expected '[' or '(' to open an interval, found " + describe(ts_.peek()));
    }
    SourcePos start = ts_.peek().pos;
    iv.lower = time_term();
    ts_.expect(Tok::Comma, "','");
    iv.upper = time_term();
    if (ts_.accept(Tok::RBracket)) {
      iv.upper_closed = true;
    } else if (ts_.accept(Tok::RParen)) {
      iv.upper_closed = false;
    } else {
      ts_.fail("expected ']' or ')' to close an interval, found " + describe(ts_.peek()));
    }
    if (!iv.lower.has_var() && !iv.upper.has_var() && iv.lower.n > iv.upper.n) {
      throw Error(ErrorCode::SyntaxError, "interval lower bound exceeds upper bound", start);
    }
    return iv;
  }

  TimeTerm time_term() {
    if (ts_.at(Tok::Number)) {
      double v = ts_.next().number;
      return TimeTerm::constant(v);
    }
    const Token& var = ts_.expect(Tok::Ident, "time variable or number");
    if (ts_.at(Tok::Plus) || ts_.at(Tok::Minus)) {
      bool plus = ts_.next().kind == Tok::Plus;
      double n = ts_.expect(Tok::Number, "number").number;
      return TimeTerm::offset(var.text, plus ? n : -n);
    }
    return TimeTerm::variable(var.text);
  }

  FormulaPtr predicate_formula() {
    SignalTermPtr term = scalar(signal_expr(false));
    Rel rel = relation();
    double bound = const_expr();
    return predicate(term, rel, bound);
  }

  Rel relation() {
    switch (ts_.peek().kind) {
    case Tok::Lt: ts_.next(); return Rel::Lt;
    case Tok::Le: ts_.next(); return Rel::Le;
    case Tok::Gt: ts_.next(); return Rel::Gt;
    case Tok::Ge: ts_.next(); return Rel::Ge;
    case Tok::Eq: ts_.next(); return Rel::Eq;
    case Tok::Ne: ts_.next(); return Rel::Ne;
    default: ts_.fail("expected a relational operator, found " + describe(ts_.peek()));
    }
  }

  // --- signal terms (vector-valued inside a norm) ---

  SignalTermPtr scalar(const Vec& v) {
    if (v.size() != 1) ts_.fail("vector-valued expression outside of a norm ||...||");
    return v.front();
  }

  Vec broadcast(BinaryOp op, const Vec& a, const Vec& b) {
    if (a.size() != b.size() && a.size() != 1 && b.size() != 1) {
      ts_.fail("vector dimension mismatch (" + std::to_string(a.size()) + " vs " +
               std::to_string(b.size()) + ")");
    }
    std::size_t n = std::max(a.size(), b.size());
    Vec out;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(binary(op, a[a.size() == 1 ? 0 : i], b[b.size() == 1 ? 0 : i]));
    }
    return out;
  }

  Vec signal_expr(bool in_norm) {
    Vec lhs = signal_product(in_norm);
    while (ts_.at(Tok::Plus) || ts_.at(Tok::Minus)) {
      BinaryOp op = ts_.next().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = broadcast(op, lhs, signal_product(in_norm));
    }
    return lhs;
  }

  Vec signal_product(bool in_norm) {
    Vec lhs = signal_unary(in_norm);
    while (ts_.at(Tok::Star) || ts_.at(Tok::Slash)) {
      BinaryOp op = ts_.next().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = broadcast(op, lhs, signal_unary(in_norm));
    }
    return lhs;
  }

  Vec signal_unary(bool in_norm) {
    if (ts_.accept(Tok::Minus)) {
      Vec v = signal_unary(in_norm);
      for (auto& x : v) x = unary(UnaryOp::Neg, x);
      return v;
    }
    return signal_primary(in_norm);
  }

  Vec signal_primary(bool in_norm) {
    if (ts_.accept(Tok::LParen)) {
      Vec v = signal_expr(in_norm);
      ts_.expect(Tok::RParen, "')'");
      return v;
    }
    if (ts_.at(Tok::Norm)) {
      if (in_norm) ts_.fail("nested norms are not supported");
      ts_.next();
      Vec v = signal_expr(true);
      ts_.expect(Tok::Norm, "'||' closing the norm");
      SignalTermPtr sum;
      for (const auto& x : v) {
        auto sq = binary(BinaryOp::Mul, x, x);
        sum = sum ? binary(BinaryOp::Add, sum, sq) : sq;
      }
      return {unary(UnaryOp::Sqrt, sum)};
    }
    if (ts_.at(Tok::Number)) {
      ts_.fail("numeric literal inside a signal term; constants belong on the right-hand side");
    }
    const Token& name = ts_.expect(Tok::Ident, "signal term");
    if (auto op = unary_function(name.text)) {
      ts_.expect(Tok::LParen, "'('");
      Vec v = signal_expr(in_norm);
      ts_.expect(Tok::RParen, "')'");
      for (auto& x : v) x = unary(*op, x);
      return v;
    }
    if (auto op = binary_function(name.text)) {
      ts_.expect(Tok::LParen, "'('");
      Vec a = signal_expr(in_norm);
      ts_.expect(Tok::Comma, "','");
      Vec b = signal_expr(in_norm);
      ts_.expect(Tok::RParen, "')'");
      return broadcast(*op, a, b);
    }
    if (reserved_words().count(name.text)) {
      throw Error(ErrorCode::SyntaxError, "'" + name.text + "' cannot start a signal term", name.pos);
    }
    const SignalDecl* decl = decls_.find(name.text);
    if (!decl) throw Error(ErrorCode::UndeclaredSignal, "signal '" + name.text + "'", name.pos);
    ts_.expect(Tok::LParen, "'(' after signal name");
    TimeTerm at = time_term();
    ts_.expect(Tok::RParen, "')'");
    if (decl->is_vector() && decl->name == name.text) {
      if (!in_norm) {
        throw Error(ErrorCode::SyntaxError,
                    "vector signal '" + name.text + "' used outside of a norm ||...||", name.pos);
      }
      Vec out;
      for (const auto& c : decl->components) out.push_back(signal_at(c, at));
      return out;
    }
    return {signal_at(name.text, at)};
  }

  // --- constant expressions on the right-hand side ---

  double const_expr() {
    double v = const_product();
    while (ts_.at(Tok::Plus) || ts_.at(Tok::Minus)) {
      bool plus = ts_.next().kind == Tok::Plus;
      double rhs = const_product();
      v = plus ? v + rhs : v - rhs;
    }
    return v;
  }

  double const_product() {
    double v = const_unary();
    while (ts_.at(Tok::Star) || ts_.at(Tok::Slash)) {
      bool mul = ts_.next().kind == Tok::Star;
      double rhs = const_unary();
      v = mul ? v * rhs : v / rhs;
    }
    if (!std::isfinite(v)) ts_.fail("constant expression is not finite");
    return v;
  }

  double const_unary() {
    if (ts_.accept(Tok::Minus)) return -const_unary();
    if (ts_.accept(Tok::Plus)) return const_unary();
    return const_primary();
  }

  double const_primary() {
    if (ts_.at(Tok::Number)) return ts_.next().number;
    if (ts_.accept(Tok::LParen)) {
      double v = const_expr();
      ts_.expect(Tok::RParen, "')'");
      return v;
    }
    const Token& name = ts_.expect(Tok::Ident, "constant");
    if (auto op = unary_function(name.text)) {
      ts_.expect(Tok::LParen, "'('");
      double v = const_expr();
      ts_.expect(Tok::RParen, "')'");
      return apply(*op, v);
    }
    if (auto op = binary_function(name.text)) {
      ts_.expect(Tok::LParen, "'('");
      double a = const_expr();
      ts_.expect(Tok::Comma, "','");
      double b = const_expr();
      ts_.expect(Tok::RParen, "')'");
      return apply(*op, a, b);
    }
    auto it = decls_.constants.find(name.text);
    if (it == decls_.constants.end()) {
      throw Error(ErrorCode::SyntaxError, "unknown constant '" + name.text + "'", name.pos);
    }
    return it->second;
  }

  TokenStream& ts_;
  const Declarations& decls_;
};

FormulaPtr finish(FormulaPtr f, const SourcePos& pos, bool check) {
  f = alpha_normalize(f);
  if (check) {
    if (auto v = validate(f)) {
      throw Error(v->kind == Violation::Kind::Condition1 ? ErrorCode::Condition1Violation
                                                         : ErrorCode::Condition2Violation,
                  v->message, pos);
    }
  }
  return f;
}

FormulaPtr parse_one(std::string_view text, const Declarations& decls, bool check) {
  TokenStream ts(detail::tokenize(text));
  SourcePos start = ts.peek().pos;
  FormulaParser p(ts, decls);
  FormulaPtr f = p.formula();
  ts.accept(Tok::Semicolon);
  if (!ts.at(Tok::End)) ts.fail("unexpected " + describe(ts.peek()) + " after formula");
  return finish(f, start, check);
}

void declare_name(std::set<std::string>& names, const Token& tok) {
  if (reserved_words().count(tok.text)) {
    throw Error(ErrorCode::SyntaxError, "'" + tok.text + "' is a reserved word", tok.pos);
  }
  if (!names.insert(tok.text).second) {
    throw Error(ErrorCode::SyntaxError, "'" + tok.text + "' declared twice", tok.pos);
  }
}

} // namespace

Spec parse_spec(std::string_view text) {
  TokenStream ts(detail::tokenize(text));
  Spec spec;
  std::set<std::string> names;
  bool have_domain = false;
  std::set<std::string> req_names;
  while (!ts.at(Tok::End)) {
    if (ts.accept(Tok::Semicolon)) continue;
    if (ts.accept_keyword("signal")) {
      do {
        const Token& name = ts.expect(Tok::Ident, "signal name");
        declare_name(names, name);
        SignalDecl decl{name.text, "", {}};
        if (ts.accept(Tok::LBracket)) {
          const Token& dim = ts.expect(Tok::Number, "vector dimension");
          if (dim.number < 1 || dim.number != std::floor(dim.number) || dim.number > 1024) {
            throw Error(ErrorCode::SyntaxError, "vector dimension must be a positive integer",
                        dim.pos);
          }
          ts.expect(Tok::RBracket, "']'");
          for (int k = 1; k <= static_cast<int>(dim.number); ++k) {
            Token comp = name;
            comp.text = name.text + "_" + std::to_string(k);
            declare_name(names, comp);
            decl.components.push_back(comp.text);
          }
        }
        if (ts.at(Tok::String)) decl.unit = ts.next().text;
        spec.decls.signals.push_back(std::move(decl));
      } while (ts.accept(Tok::Comma));
      continue;
    }
    if (ts.accept_keyword("domain")) {
      const Token& b = ts.expect(Tok::Number, "domain end");
      if (!(b.number > 0.0)) throw Error(ErrorCode::SyntaxError, "domain end must be positive", b.pos);
      if (have_domain) throw Error(ErrorCode::SyntaxError, "domain declared twice", b.pos);
      spec.time_domain_end = b.number;
      have_domain = true;
      continue;
    }
    if (ts.accept_keyword("const")) {
      const Token& name = ts.expect(Tok::Ident, "constant name");
      declare_name(names, name);
      ts.expect(Tok::Eq, "'='");
      FormulaParser p(ts, spec.decls);
      spec.decls.constants[name.text] = p.constant();
      ts.accept(Tok::Semicolon);
      continue;
    }
    if (ts.accept_keyword("req")) {
      const Token& name = ts.expect(Tok::Ident, "requirement name");
      if (!req_names.insert(name.text).second) {
        throw Error(ErrorCode::SyntaxError, "requirement '" + name.text + "' declared twice",
                    name.pos);
      }
      ts.expect(Tok::Colon, "':'");
      SourcePos start = ts.peek().pos;
      FormulaParser p(ts, spec.decls);
      FormulaPtr f = finish(p.formula(), start, true);
      if (!ts.at(Tok::End) && !ts.accept(Tok::Semicolon)) {
        ts.fail("expected ';' after requirement, found " + describe(ts.peek()));
      }
      spec.requirements.push_back(Requirement{name.text, f, name.pos});
      continue;
    }
    ts.fail("expected 'signal', 'domain', 'const' or 'req', found " + describe(ts.peek()));
  }
  if (!have_domain) {
    throw Error(ErrorCode::SyntaxError, "missing 'domain <end>' declaration", ts.peek().pos);
  }
  return spec;
}

Spec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

FormulaPtr parse_formula(std::string_view text, const Declarations& decls) {
  return parse_one(text, decls, true);
}

FormulaPtr parse_formula(std::string_view text, const std::set<std::string>& signals) {
  Declarations decls;
  for (const auto& s : signals) decls.signals.push_back(SignalDecl{s, "", {}});
  return parse_one(text, decls, true);
}

FormulaPtr parse_formula_unchecked(std::string_view text, const Declarations& decls) {
  return parse_one(text, decls, false);
}

} // namespace rfol
