#include "rfol/ast.hpp"

#include "rfol/error.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace rfol {

std::string_view to_string(Rel rel) {
  switch (rel) {
  case Rel::Lt: return "<";
  case Rel::Le: return "<=";
  case Rel::Gt: return ">";
  case Rel::Ge: return ">=";
  case Rel::Eq: return "=";
  case Rel::Ne: return "!=";
  }
  return "?";
}

std::string_view to_string(UnaryOp op) {
  switch (op) {
  case UnaryOp::Neg: return "neg";
  case UnaryOp::Abs: return "abs";
  case UnaryOp::Sin: return "sin";
  case UnaryOp::Cos: return "cos";
  case UnaryOp::Sqrt: return "sqrt";
  case UnaryOp::Exp: return "exp";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
  case BinaryOp::Add: return "+";
  case BinaryOp::Sub: return "-";
  case BinaryOp::Mul: return "*";
  case BinaryOp::Div: return "/";
  case BinaryOp::Min: return "min";
  case BinaryOp::Max: return "max";
  case BinaryOp::Pow: return "pow";
  }
  return "?";
}

Rel negate(Rel rel) {
  switch (rel) {
  case Rel::Lt: return Rel::Ge;
  case Rel::Le: return Rel::Gt;
  case Rel::Gt: return Rel::Le;
  case Rel::Ge: return Rel::Lt;
  case Rel::Eq: return Rel::Ne;
  case Rel::Ne: return Rel::Eq;
  }
  return rel;
}

TimeTerm TimeTerm::variable(std::string name) {
  return TimeTerm{Kind::Var, std::move(name), 0.0};
}

TimeTerm TimeTerm::constant(double value) { return TimeTerm{Kind::Const, {}, value}; }

TimeTerm TimeTerm::offset(std::string name, double offset) {
  if (offset > 0.0) return TimeTerm{Kind::Plus, std::move(name), offset};
  if (offset < 0.0) return TimeTerm{Kind::Minus, std::move(name), -offset};
  return variable(std::move(name));
}

double TimeTerm::signed_offset() const {
  switch (kind) {
  case Kind::Var: return 0.0;
  case Kind::Const: return n;
  case Kind::Plus: return n;
  case Kind::Minus: return -n;
  }
  return 0.0;
}

double TimeTerm::instantiate(double var_value) const {
  switch (kind) {
  case Kind::Var: return var_value;
  case Kind::Const: return n;
  case Kind::Plus: return var_value + n;
  case Kind::Minus: return var_value - n;
  }
  return n;
}

SignalTermPtr signal_at(std::string signal, TimeTerm at) {
  return std::make_shared<const SignalTerm>(SignalTerm{SignalAt{std::move(signal), std::move(at)}});
}

SignalTermPtr unary(UnaryOp op, SignalTermPtr arg) {
  return std::make_shared<const SignalTerm>(SignalTerm{UnaryTerm{op, std::move(arg)}});
}

SignalTermPtr binary(BinaryOp op, SignalTermPtr lhs, SignalTermPtr rhs) {
  return std::make_shared<const SignalTerm>(
      SignalTerm{BinaryTerm{op, std::move(lhs), std::move(rhs)}});
}

FormulaPtr predicate(SignalTermPtr term, Rel rel, double bound) {
  return std::make_shared<const Formula>(Formula{Predicate{std::move(term), rel, bound}});
}

FormulaPtr conj(FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<const Formula>(
      Formula{Junction{Junctor::And, std::move(lhs), std::move(rhs)}});
}

FormulaPtr disj(FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<const Formula>(
      Formula{Junction{Junctor::Or, std::move(lhs), std::move(rhs)}});
}

FormulaPtr quantified(Quantifier q, std::string var, Interval iv, FormulaPtr body) {
  return std::make_shared<const Formula>(
      Formula{Quantified{q, std::move(var), std::move(iv), std::move(body)}});
}

FormulaPtr forall(std::string var, Interval iv, FormulaPtr body) {
  return quantified(Quantifier::Forall, std::move(var), std::move(iv), std::move(body));
}

FormulaPtr exists(std::string var, Interval iv, FormulaPtr body) {
  return quantified(Quantifier::Exists, std::move(var), std::move(iv), std::move(body));
}

Interval closed_interval(double lo, double hi) {
  return Interval{TimeTerm::constant(lo), TimeTerm::constant(hi), true, true};
}

// ---------------------------------------------------------------------------
// Free variables and size

namespace {

void add_var(std::set<std::string>& out, const TimeTerm& tt) {
  if (tt.has_var()) out.insert(tt.var);
}

void collect_free(const SignalTerm& term, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SignalAt>) {
          add_var(out, node.at);
        } else if constexpr (std::is_same_v<T, UnaryTerm>) {
          collect_free(*node.arg, out);
        } else {
          collect_free(*node.lhs, out);
          collect_free(*node.rhs, out);
        }
      },
      term.node);
}

void collect_signals(const SignalTerm& term, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SignalAt>) {
          out.insert(node.signal);
        } else if constexpr (std::is_same_v<T, UnaryTerm>) {
          collect_signals(*node.arg, out);
        } else {
          collect_signals(*node.lhs, out);
          collect_signals(*node.rhs, out);
        }
      },
      term.node);
}

std::size_t term_size(const SignalTerm& term) {
  return std::visit(
      [](const auto& node) -> std::size_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SignalAt>) {
          return 0;
        } else if constexpr (std::is_same_v<T, UnaryTerm>) {
          return 1 + term_size(*node.arg);
        } else {
          return 1 + term_size(*node.lhs) + term_size(*node.rhs);
        }
      },
      term.node);
}

} // namespace

std::set<std::string> free_time_vars(const SignalTerm& term) {
  std::set<std::string> out;
  collect_free(term, out);
  return out;
}

std::set<std::string> free_time_vars(const Formula& f) {
  return std::visit(
      [](const auto& node) -> std::set<std::string> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return free_time_vars(*node.term);
        } else if constexpr (std::is_same_v<T, Junction>) {
          auto out = free_time_vars(*node.lhs);
          auto rhs = free_time_vars(*node.rhs);
          out.insert(rhs.begin(), rhs.end());
          return out;
        } else {
          auto out = free_time_vars(*node.body);
          out.erase(node.var);
          add_var(out, node.iv.lower);
          add_var(out, node.iv.upper);
          return out;
        }
      },
      f.node);
}

std::set<std::string> signals_used(const Formula& f) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          collect_signals(*node.term, out);
        } else if constexpr (std::is_same_v<T, Junction>) {
          auto l = signals_used(*node.lhs);
          auto r = signals_used(*node.rhs);
          out.insert(l.begin(), l.end());
          out.insert(r.begin(), r.end());
        } else {
          out = signals_used(*node.body);
        }
      },
      f.node);
  return out;
}

std::size_t formula_size(const Formula& f) {
  return std::visit(
      [](const auto& node) -> std::size_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return 1 + term_size(*node.term);
        } else if constexpr (std::is_same_v<T, Junction>) {
          return 1 + formula_size(*node.lhs) + formula_size(*node.rhs);
        } else {
          return 1 + formula_size(*node.body);
        }
      },
      f.node);
}

std::size_t quantifier_depth(const Formula& f) {
  return std::visit(
      [](const auto& node) -> std::size_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return 0;
        } else if constexpr (std::is_same_v<T, Junction>) {
          return std::max(quantifier_depth(*node.lhs), quantifier_depth(*node.rhs));
        } else {
          return 1 + quantifier_depth(*node.body);
        }
      },
      f.node);
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

std::string join_vars(const std::set<std::string>& vars) {
  std::string out = "{";
  for (auto it = vars.begin(); it != vars.end(); ++it) {
    if (it != vars.begin()) out += ", ";
    out += *it;
  }
  return out + "}";
}

// Returns the free variables of `f`; records the first Condition2 violation.
std::set<std::string> check_subformulas(const FormulaPtr& f, std::optional<Violation>& found) {
  std::set<std::string> fv = std::visit(
      [&](const auto& node) -> std::set<std::string> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return free_time_vars(*node.term);
        } else if constexpr (std::is_same_v<T, Junction>) {
          auto out = check_subformulas(node.lhs, found);
          auto rhs = check_subformulas(node.rhs, found);
          out.insert(rhs.begin(), rhs.end());
          return out;
        } else {
          auto out = check_subformulas(node.body, found);
          out.erase(node.var);
          add_var(out, node.iv.lower);
          add_var(out, node.iv.upper);
          return out;
        }
      },
      f->node);
  // Post-order, so the innermost offender is reported.
  if (fv.size() > 1 && !found) {
    found = Violation{Violation::Kind::Condition2, f, fv,
                      "sub-formula '" + to_string(*f) + "' has " + std::to_string(fv.size()) +
                          " free time variables " + join_vars(fv)};
  }
  return fv;
}

} // namespace

std::optional<Violation> validate(const FormulaPtr& f) {
  std::optional<Violation> found;
  auto root_free = check_subformulas(f, found);
  if (!root_free.empty()) {
    return Violation{Violation::Kind::Condition1, f, root_free,
                     "formula is not closed: free time variables " + join_vars(root_free)};
  }
  return found;
}

void require_valid(const FormulaPtr& f) {
  if (auto v = validate(f)) {
    throw Error(v->kind == Violation::Kind::Condition1 ? ErrorCode::Condition1Violation
                                                       : ErrorCode::Condition2Violation,
                v->message);
  }
}

// ---------------------------------------------------------------------------
// Alpha normalization and negation

namespace {

using Renaming = std::map<std::string, std::string>;

TimeTerm rename(const TimeTerm& tt, const Renaming& env) {
  if (!tt.has_var()) return tt;
  auto it = env.find(tt.var);
  if (it == env.end()) return tt;
  TimeTerm out = tt;
  out.var = it->second;
  return out;
}

SignalTermPtr rename(const SignalTermPtr& term, const Renaming& env) {
  return std::visit(
      [&](const auto& node) -> SignalTermPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SignalAt>) {
          return signal_at(node.signal, rename(node.at, env));
        } else if constexpr (std::is_same_v<T, UnaryTerm>) {
          return unary(node.op, rename(node.arg, env));
        } else {
          return binary(node.op, rename(node.lhs, env), rename(node.rhs, env));
        }
      },
      term->node);
}

void collect_binders(const Formula& f, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Junction>) {
          collect_binders(*node.lhs, out);
          collect_binders(*node.rhs, out);
        } else if constexpr (std::is_same_v<T, Quantified>) {
          out.insert(node.var);
          collect_binders(*node.body, out);
        }
      },
      f.node);
}

struct AlphaState {
  std::set<std::string> taken;
  std::set<std::string> reserved;

  std::string claim(const std::string& name) {
    if (!taken.count(name)) {
      taken.insert(name);
      return name;
    }
    for (int k = 1;; ++k) {
      std::string candidate = name + "_" + std::to_string(k);
      if (!taken.count(candidate) && !reserved.count(candidate)) {
        taken.insert(candidate);
        return candidate;
      }
    }
  }
};

FormulaPtr alpha(const FormulaPtr& f, const Renaming& env, AlphaState& st) {
  return std::visit(
      [&](const auto& node) -> FormulaPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return predicate(rename(node.term, env), node.rel, node.bound);
        } else if constexpr (std::is_same_v<T, Junction>) {
          auto lhs = alpha(node.lhs, env, st);
          auto rhs = alpha(node.rhs, env, st);
          return std::make_shared<const Formula>(Formula{Junction{node.op, lhs, rhs}});
        } else {
          Interval iv{rename(node.iv.lower, env), rename(node.iv.upper, env), node.iv.lower_closed,
                      node.iv.upper_closed};
          std::string fresh = st.claim(node.var);
          Renaming inner = env;
          inner[node.var] = fresh;
          return quantified(node.q, fresh, iv, alpha(node.body, inner, st));
        }
      },
      f->node);
}

} // namespace

FormulaPtr alpha_normalize(const FormulaPtr& f) {
  AlphaState st;
  st.taken = free_time_vars(*f);
  collect_binders(*f, st.reserved);
  st.reserved.insert(st.taken.begin(), st.taken.end());
  return alpha(f, {}, st);
}

FormulaPtr negate(const FormulaPtr& f) {
  return std::visit(
      [](const auto& node) -> FormulaPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return predicate(node.term, negate(node.rel), node.bound);
        } else if constexpr (std::is_same_v<T, Junction>) {
          Junctor dual = node.op == Junctor::And ? Junctor::Or : Junctor::And;
          return std::make_shared<const Formula>(
              Formula{Junction{dual, negate(node.lhs), negate(node.rhs)}});
        } else {
          Quantifier dual = node.q == Quantifier::Forall ? Quantifier::Exists : Quantifier::Forall;
          return quantified(dual, node.var, node.iv, negate(node.body));
        }
      },
      f->node);
}

// ---------------------------------------------------------------------------
// Structural equality

bool equal(const TimeTerm& a, const TimeTerm& b) { return a == b; }

bool equal(const SignalTerm& a, const SignalTerm& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = std::get_if<SignalAt>(&a.node)) {
    auto& y = std::get<SignalAt>(b.node);
    return x->signal == y.signal && x->at == y.at;
  }
  if (auto* x = std::get_if<UnaryTerm>(&a.node)) {
    auto& y = std::get<UnaryTerm>(b.node);
    return x->op == y.op && equal(*x->arg, *y.arg);
  }
  auto& x = std::get<BinaryTerm>(a.node);
  auto& y = std::get<BinaryTerm>(b.node);
  return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
}

bool equal(const Formula& a, const Formula& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = std::get_if<Predicate>(&a.node)) {
    auto& y = std::get<Predicate>(b.node);
    return x->rel == y.rel && x->bound == y.bound && equal(*x->term, *y.term);
  }
  if (auto* x = std::get_if<Junction>(&a.node)) {
    auto& y = std::get<Junction>(b.node);
    return x->op == y.op && equal(*x->lhs, *y.lhs) && equal(*x->rhs, *y.rhs);
  }
  auto& x = std::get<Quantified>(a.node);
  auto& y = std::get<Quantified>(b.node);
  return x.q == y.q && x.var == y.var && x.iv == y.iv && equal(*x.body, *y.body);
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  char buf[64];
  for (int precision : {6, 10, 15, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string to_string(const TimeTerm& tt) {
  switch (tt.kind) {
  case TimeTerm::Kind::Var: return tt.var;
  case TimeTerm::Kind::Const: return format_number(tt.n);
  case TimeTerm::Kind::Plus: return tt.var + " + " + format_number(tt.n);
  case TimeTerm::Kind::Minus: return tt.var + " - " + format_number(tt.n);
  }
  return "?";
}

std::string to_string(const Interval& iv) {
  return std::string(iv.lower_closed ? "[" : "(") + to_string(iv.lower) + ", " +
         to_string(iv.upper) + (iv.upper_closed ? "]" : ")");
}

namespace {

bool is_infix(const SignalTerm& term) {
  auto* b = std::get_if<BinaryTerm>(&term.node);
  return b && (b->op == BinaryOp::Add || b->op == BinaryOp::Sub || b->op == BinaryOp::Mul ||
               b->op == BinaryOp::Div);
}

std::string operand(const SignalTerm& term) {
  return is_infix(term) ? "(" + to_string(term) + ")" : to_string(term);
}

std::string junction_operand(const Formula& f) {
  if (std::holds_alternative<Predicate>(f.node)) return to_string(f);
  return "(" + to_string(f) + ")";
}

} // namespace

std::string to_string(const SignalTerm& term) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SignalAt>) {
          return node.signal + "(" + to_string(node.at) + ")";
        } else if constexpr (std::is_same_v<T, UnaryTerm>) {
          if (node.op == UnaryOp::Neg) return "-" + operand(*node.arg);
          return std::string(to_string(node.op)) + "(" + to_string(*node.arg) + ")";
        } else {
          if (is_infix(SignalTerm{node})) {
            return operand(*node.lhs) + " " + std::string(to_string(node.op)) + " " +
                   operand(*node.rhs);
          }
          return std::string(to_string(node.op)) + "(" + to_string(*node.lhs) + ", " +
                 to_string(*node.rhs) + ")";
        }
      },
      term.node);
}

std::string to_string(const Formula& f) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return to_string(*node.term) + " " + std::string(to_string(node.rel)) + " " +
                 format_number(node.bound);
        } else if constexpr (std::is_same_v<T, Junction>) {
          return junction_operand(*node.lhs) + (node.op == Junctor::And ? " and " : " or ") +
                 junction_operand(*node.rhs);
        } else {
          return std::string(node.q == Quantifier::Forall ? "forall " : "exists ") + node.var +
                 " in " + to_string(node.iv) + ": " + to_string(*node.body);
        }
      },
      f.node);
}

} // namespace rfol
