#include "rfol/stl.hpp"

#include "lexer.hpp"
#include "rfol/error.hpp"
#include "rfol/ops.hpp"
#include "rfol/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace rfol::stl {

using detail::Tok;
using detail::TokenStream;

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

void check_window(double a, double b) {
  if (!(a >= 0.0) || !(a <= b) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidArgument,
                "temporal window [" + format_number(a) + ", " + format_number(b) + "] needs 0 <= a <= b");
  }
}

} // namespace

FormulaPtr atom(std::string signal, Rel rel, double c) {
  if (rel == Rel::Eq || rel == Rel::Ne) {
    throw Error(ErrorCode::InvalidArgument, "STL atoms compare with <, <=, > or >=");
  }
  return make(Formula{Op::Atom, std::move(signal), rel, c, 0, 0, nullptr, nullptr});
}

FormulaPtr lnot(FormulaPtr f) { return make(Formula{Op::Not, {}, Rel::Lt, 0, 0, 0, std::move(f), nullptr}); }

FormulaPtr land(FormulaPtr l, FormulaPtr r) {
  return make(Formula{Op::And, {}, Rel::Lt, 0, 0, 0, std::move(l), std::move(r)});
}

FormulaPtr lor(FormulaPtr l, FormulaPtr r) {
  return make(Formula{Op::Or, {}, Rel::Lt, 0, 0, 0, std::move(l), std::move(r)});
}

FormulaPtr eventually(double a, double b, FormulaPtr f) {
  check_window(a, b);
  return make(Formula{Op::Finally, {}, Rel::Lt, 0, a, b, std::move(f), nullptr});
}

FormulaPtr always(double a, double b, FormulaPtr f) {
  check_window(a, b);
  return make(Formula{Op::Globally, {}, Rel::Lt, 0, a, b, std::move(f), nullptr});
}

FormulaPtr until(double a, double b, FormulaPtr l, FormulaPtr r) {
  check_window(a, b);
  return make(Formula{Op::Until, {}, Rel::Lt, 0, a, b, std::move(l), std::move(r)});
}

FormulaPtr release(double a, double b, FormulaPtr l, FormulaPtr r) {
  check_window(a, b);
  return make(Formula{Op::Release, {}, Rel::Lt, 0, a, b, std::move(l), std::move(r)});
}

// --- parsing ---

namespace {

class Parser {
public:
  explicit Parser(TokenStream& ts) : ts_(ts) {}

  FormulaPtr formula() {
    FormulaPtr lhs = disjunction();
    for (Op op : {Op::Until, Op::Release}) {
      if (at_temporal(op == Op::Until ? "U" : "R")) {
        ts_.next();
        auto [a, b] = window();
        FormulaPtr rhs = formula();
        return op == Op::Until ? until(a, b, lhs, rhs) : release(a, b, lhs, rhs);
      }
    }
    return lhs;
  }

private:
  bool at_temporal(std::string_view name) const {
    return ts_.at_keyword(name) && ts_.peek(1).kind == Tok::LBracket;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (ts_.accept(Tok::Or) || ts_.accept_keyword("or")) lhs = lor(lhs, conjunction());
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = unary();
    while (ts_.accept(Tok::And) || ts_.accept_keyword("and")) lhs = land(lhs, unary());
    return lhs;
  }

  FormulaPtr unary() {
    if (ts_.accept(Tok::Not) || ts_.accept_keyword("not")) return lnot(unary());
    for (Op op : {Op::Finally, Op::Globally}) {
      if (at_temporal(op == Op::Finally ? "F" : "G")) {
        ts_.next();
        auto [a, b] = window();
        FormulaPtr body = unary();
        return op == Op::Finally ? eventually(a, b, body) : always(a, b, body);
      }
    }
    if (ts_.accept(Tok::LParen)) {
      FormulaPtr inner = formula();
      ts_.expect(Tok::RParen, "')'");
      return inner;
    }
    const auto& name = ts_.expect(Tok::Ident, "signal name");
    Rel rel;
    switch (ts_.peek().kind) {
    case Tok::Lt: rel = Rel::Lt; break;
    case Tok::Le: rel = Rel::Le; break;
    case Tok::Gt: rel = Rel::Gt; break;
    case Tok::Ge: rel = Rel::Ge; break;
    default: ts_.fail("expected <, <=, > or >=, found " + describe(ts_.peek()));
    }
    ts_.next();
    double sign = ts_.accept(Tok::Minus) ? -1.0 : 1.0;
    double c = ts_.expect(Tok::Number, "number").number;
    return atom(name.text, rel, sign * c);
  }

  std::pair<double, double> window() {
    auto pos = ts_.peek().pos;
    ts_.expect(Tok::LBracket, "'['");
    double a = ts_.expect(Tok::Number, "window start").number;
    ts_.expect(Tok::Comma, "','");
    double b = ts_.expect(Tok::Number, "window end").number;
    ts_.expect(Tok::RBracket, "']'");
    if (a > b) throw Error(ErrorCode::SyntaxError, "window start exceeds its end", pos);
    return {a, b};
  }

  TokenStream& ts_;
};

std::string window_text(const Formula& f) {
  return "[" + format_number(f.a) + ", " + format_number(f.b) + "]";
}

std::string operand(const Formula& f) {
  if (f.op == Op::Atom || f.op == Op::Not || f.op == Op::Finally || f.op == Op::Globally) {
    return to_string(f);
  }
  return "(" + to_string(f) + ")";
}

} // namespace

FormulaPtr parse(std::string_view text) {
  TokenStream ts(detail::tokenize(text));
  Parser p(ts);
  FormulaPtr f = p.formula();
  ts.accept(Tok::Semicolon);
  if (!ts.at(Tok::End)) ts.fail("unexpected " + describe(ts.peek()) + " after formula");
  return f;
}

std::string to_string(const Formula& f) {
  switch (f.op) {
  case Op::Atom: return f.signal + " " + std::string(rfol::to_string(f.rel)) + " " + format_number(f.c);
  case Op::Not: return "not " + operand(*f.lhs);
  case Op::And: return operand(*f.lhs) + " and " + operand(*f.rhs);
  case Op::Or: return operand(*f.lhs) + " or " + operand(*f.rhs);
  case Op::Finally: return "F" + window_text(f) + " " + operand(*f.lhs);
  case Op::Globally: return "G" + window_text(f) + " " + operand(*f.lhs);
  case Op::Until: return operand(*f.lhs) + " U" + window_text(f) + " " + operand(*f.rhs);
  case Op::Release: return operand(*f.lhs) + " R" + window_text(f) + " " + operand(*f.rhs);
  }
  return {};
}

// --- normal form ---

namespace {

FormulaPtr push(const FormulaPtr& f, bool negated) {
  switch (f->op) {
  case Op::Atom: return negated ? atom(f->signal, negate(f->rel), f->c) : f;
  case Op::Not: return push(f->lhs, !negated);
  case Op::And:
  case Op::Or: {
    auto l = push(f->lhs, negated);
    auto r = push(f->rhs, negated);
    return (f->op == Op::And) != negated ? land(l, r) : lor(l, r);
  }
  case Op::Finally:
  case Op::Globally: {
    auto body = push(f->lhs, negated);
    return (f->op == Op::Finally) != negated ? eventually(f->a, f->b, body) : always(f->a, f->b, body);
  }
  case Op::Until:
  case Op::Release: {
    if (!negated) {
      auto l = push(f->lhs, false);
      auto r = push(f->rhs, false);
      return f->op == Op::Until ? until(f->a, f->b, l, r) : release(f->a, f->b, l, r);
    }
    auto nl = push(f->lhs, true);
    auto nr = push(f->rhs, true);
    if (f->op == Op::Until) return release(f->a, f->b, nl, lor(nl, nr));
    return until(f->a, f->b, lor(nl, nr), nr);
  }
  }
  return f;
}

} // namespace

FormulaPtr nnf(const FormulaPtr& f) { return push(f, false); }

// --- translation ---

namespace {

class Translator {
public:
  rfol::FormulaPtr run(const FormulaPtr& f) { return go(*f, std::nullopt); }

private:
  using Ctx = std::optional<std::string>;

  std::string fresh() { return "t" + std::to_string(++counter_); }

  static TimeTerm at(const Ctx& ctx, double offset) {
    return ctx ? TimeTerm::offset(*ctx, offset) : TimeTerm::constant(offset);
  }

  static Interval window(const Ctx& ctx, double a, double b) {
    return Interval{at(ctx, a), at(ctx, b), true, true};
  }

  rfol::FormulaPtr go(const Formula& f, const Ctx& ctx) {
    switch (f.op) {
    case Op::Atom: {
      TimeTerm idx = ctx ? TimeTerm::variable(*ctx) : TimeTerm::constant(0.0);
      return predicate(signal_at(f.signal, idx), f.rel, f.c);
    }
    case Op::Not:
      return negate(go(*f.lhs, ctx));
    case Op::And:
      return conj(go(*f.lhs, ctx), go(*f.rhs, ctx));
    case Op::Or:
      return disj(go(*f.lhs, ctx), go(*f.rhs, ctx));
    case Op::Finally:
    case Op::Globally: {
      std::string t = fresh();
      auto body = go(*f.lhs, t);
      return quantified(f.op == Op::Finally ? Quantifier::Exists : Quantifier::Forall, t,
                        window(ctx, f.a, f.b), body);
    }
    case Op::Until: {
      // exists t in I: (rhs(t) and forall t' in [lo, t]: lhs(t'))
      std::string t = fresh();
      std::string tp = fresh();
      auto rhs = go(*f.rhs, t);
      auto lhs = go(*f.lhs, tp);
      Interval prefix{at(ctx, f.a), TimeTerm::variable(t), true, true};
      return exists(t, window(ctx, f.a, f.b), conj(rhs, forall(tp, prefix, lhs)));
    }
    case Op::Release: {
      // exists t in I: ((rhs(t) and lhs(t)) and forall t' in [lo, t]: rhs(t'))
      //   or forall t'' in I: rhs(t'')
      std::string t = fresh();
      std::string tp = fresh();
      auto both = conj(go(*f.rhs, t), go(*f.lhs, t));
      Interval prefix{at(ctx, f.a), TimeTerm::variable(t), true, true};
      auto first = exists(t, window(ctx, f.a, f.b), conj(both, forall(tp, prefix, go(*f.rhs, tp))));
      std::string ts = fresh();
      auto second = forall(ts, window(ctx, f.a, f.b), go(*f.rhs, ts));
      return disj(first, second);
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown STL operator");
  }

  int counter_ = 0;
};

class BooleanEval {
public:
  explicit BooleanEval(const Trace& trace) : trace_(trace) {}

  bool at(const Formula& f, double s) {
    switch (f.op) {
    case Op::Atom: {
      auto col = trace_.signal_index(f.signal);
      if (!col) throw Error(ErrorCode::UndefinedFormula, "signal " + f.signal + " is not in the trace");
      return diff(f.rel, trace_.sample(*col, s, Interpolation::Linear), f.c, 1e-9) >= 0.0;
    }
    case Op::Not: return !at(*f.lhs, s);
    case Op::And: return at(*f.lhs, s) && at(*f.rhs, s);
    case Op::Or: return at(*f.lhs, s) || at(*f.rhs, s);
    case Op::Finally: {
      for (double t : points(s + f.a, s + f.b)) {
        if (at(*f.lhs, t)) return true;
      }
      return false;
    }
    case Op::Globally: {
      for (double t : points(s + f.a, s + f.b)) {
        if (!at(*f.lhs, t)) return false;
      }
      return true;
    }
    case Op::Until: {
      // Scanning forward, p must hold at every point up to and including the witness.
      for (double t : points(s + f.a, s + f.b)) {
        if (!at(*f.lhs, t)) return false;
        if (at(*f.rhs, t)) return true;
      }
      return false;
    }
    case Op::Release: {
      bool always_q = true;
      for (double t : points(s + f.a, s + f.b)) {
        if (!at(*f.rhs, t)) {
          always_q = false;
          break;
        }
        if (at(*f.lhs, t)) return true;
      }
      return always_q;
    }
    }
    return false;
  }

private:
  std::vector<double> points(double lo, double hi) const {
    if (lo < 0.0 || hi > trace_.domain_end()) {
      throw Error(ErrorCode::UndefinedFormula, "STL window [" + format_number(lo) + ", " +
                                                   format_number(hi) + "] leaves the time domain");
    }
    return candidate_times(trace_, lo, true, hi, true);
  }

  const Trace& trace_;
};

} // namespace

rfol::FormulaPtr to_rfol(const FormulaPtr& f) { return Translator().run(nnf(f)); }

bool holds(const FormulaPtr& f, const Trace& trace) { return BooleanEval(trace).at(*f, 0.0); }

double horizon(const Formula& f) {
  switch (f.op) {
  case Op::Atom: return 0.0;
  case Op::Not: return horizon(*f.lhs);
  case Op::And:
  case Op::Or: return std::max(horizon(*f.lhs), horizon(*f.rhs));
  case Op::Finally:
  case Op::Globally: return f.b + horizon(*f.lhs);
  case Op::Until:
  case Op::Release: return f.b + std::max(horizon(*f.lhs), horizon(*f.rhs));
  }
  return 0.0;
}

} // namespace rfol::stl
