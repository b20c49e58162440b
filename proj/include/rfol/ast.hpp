#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rfol {

enum class Rel { Lt, Le, Gt, Ge, Eq, Ne };
enum class UnaryOp { Neg, Abs, Sin, Cos, Sqrt, Exp };
enum class BinaryOp { Add, Sub, Mul, Div, Min, Max, Pow };
enum class Quantifier { Forall, Exists };
enum class Junctor { And, Or };

std::string_view to_string(Rel rel);
std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);

/// Relation holding exactly when `rel` does not.
Rel negate(Rel rel);

/// A time term: `t`, `n`, `t + n` or `t - n` with n >= 0.
struct TimeTerm {
  enum class Kind { Var, Const, Plus, Minus };

  Kind kind = Kind::Const;
  std::string var;
  double n = 0.0;

  static TimeTerm variable(std::string name);
  static TimeTerm constant(double value);
  /// `var + offset`, choosing Plus/Minus/Var from the sign of `offset`.
  static TimeTerm offset(std::string name, double offset);

  bool has_var() const { return kind != Kind::Const; }
  /// Offset relative to the variable (Const: the value itself).
  double signed_offset() const;
  double instantiate(double var_value) const;

  friend bool operator==(const TimeTerm&, const TimeTerm&) = default;
};

struct Interval {
  TimeTerm lower;
  TimeTerm upper;
  bool lower_closed = true;
  bool upper_closed = true;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct SignalTerm;
using SignalTermPtr = std::shared_ptr<const SignalTerm>;

struct SignalAt {
  std::string signal;
  TimeTerm at;
};

struct UnaryTerm {
  UnaryOp op;
  SignalTermPtr arg;
};

struct BinaryTerm {
  BinaryOp op;
  SignalTermPtr lhs;
  SignalTermPtr rhs;
};

struct SignalTerm {
  std::variant<SignalAt, UnaryTerm, BinaryTerm> node;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Predicate {
  SignalTermPtr term;
  Rel rel;
  double bound;
};

struct Junction {
  Junctor op;
  FormulaPtr lhs;
  FormulaPtr rhs;
};

struct Quantified {
  Quantifier q;
  std::string var;
  Interval iv;
  FormulaPtr body;
};

/// RFOL formula term. There is no negation node: negation lives in the relations.
struct Formula {
  std::variant<Predicate, Junction, Quantified> node;
};

// Construction helpers.
SignalTermPtr signal_at(std::string signal, TimeTerm at);
SignalTermPtr unary(UnaryOp op, SignalTermPtr arg);
SignalTermPtr binary(BinaryOp op, SignalTermPtr lhs, SignalTermPtr rhs);
FormulaPtr predicate(SignalTermPtr term, Rel rel, double bound);
FormulaPtr conj(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr disj(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr forall(std::string var, Interval iv, FormulaPtr body);
FormulaPtr exists(std::string var, Interval iv, FormulaPtr body);
FormulaPtr quantified(Quantifier q, std::string var, Interval iv, FormulaPtr body);

/// Closed interval `[lo, hi]` with constant bounds.
Interval closed_interval(double lo, double hi);

/// Time variables occurring free in the term / formula. Interval bounds of a
/// quantifier count as occurrences in the quantified sub-formula.
std::set<std::string> free_time_vars(const SignalTerm& term);
std::set<std::string> free_time_vars(const Formula& f);

/// Signal names referenced anywhere in the formula.
std::set<std::string> signals_used(const Formula& f);

/// Number of quantifiers, junctions, predicates and arithmetic operator nodes.
std::size_t formula_size(const Formula& f);

/// Largest quantifier nesting depth (0 for a quantifier-free formula).
std::size_t quantifier_depth(const Formula& f);

struct Violation {
  enum class Kind { Condition1, Condition2 };
  Kind kind;
  FormulaPtr offending;
  std::set<std::string> free_vars;
  std::string message;
};

/// Checks closedness and the at-most-one-free-variable condition on every
/// sub-formula. Returns the first violation found in pre-order.
std::optional<Violation> validate(const FormulaPtr& f);

/// Throws rfol::Error with Condition1Violation / Condition2Violation.
void require_valid(const FormulaPtr& f);

/// Renames bound variables so that every binder in the formula has a distinct
/// name that also differs from every free variable. First binders keep their name.
FormulaPtr alpha_normalize(const FormulaPtr& f);

/// Pushes a negation through the formula: relations flip, junctors and
/// quantifiers swap with their duals.
FormulaPtr negate(const FormulaPtr& f);

bool equal(const TimeTerm& a, const TimeTerm& b);
bool equal(const SignalTerm& a, const SignalTerm& b);
bool equal(const Formula& a, const Formula& b);

/// Concrete syntax accepted back by the parser.
std::string to_string(const TimeTerm& tt);
std::string to_string(const Interval& iv);
std::string to_string(const SignalTerm& term);
std::string to_string(const Formula& f);

/// Shortest round-trippable decimal form of a double.
std::string format_number(double v);

} // namespace rfol
