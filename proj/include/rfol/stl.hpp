#pragma once

#include "rfol/ast.hpp"
#include "rfol/trace.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace rfol::stl {

enum class Op { Atom, Not, And, Or, Finally, Globally, Until, Release };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Bounded STL. Atoms compare one signal with a constant; temporal operators
/// carry a closed window [a, b] with 0 <= a <= b. Unary operators use `lhs`.
struct Formula {
  Op op;
  std::string signal;
  Rel rel = Rel::Lt;
  double c = 0.0;
  double a = 0.0;
  double b = 0.0;
  FormulaPtr lhs;
  FormulaPtr rhs;
};

FormulaPtr atom(std::string signal, Rel rel, double c);
FormulaPtr lnot(FormulaPtr f);
FormulaPtr land(FormulaPtr l, FormulaPtr r);
FormulaPtr lor(FormulaPtr l, FormulaPtr r);
FormulaPtr eventually(double a, double b, FormulaPtr f);
FormulaPtr always(double a, double b, FormulaPtr f);
FormulaPtr until(double a, double b, FormulaPtr l, FormulaPtr r);
FormulaPtr release(double a, double b, FormulaPtr l, FormulaPtr r);

/// Syntax: `x < 3`, `not`, `and`, `or`, `F[a,b] p`, `G[a,b] p`, `p U[a,b] q`,
/// `p R[a,b] q`. Unicode connectives are accepted as in RFOL.
FormulaPtr parse(std::string_view text);

std::string to_string(const Formula& f);

/// Negations pushed onto atoms and then absorbed into the relation.
/// The duals of U and R match the window convention of `until` below:
/// not(p U q) = (not p) R (not p or not q), not(p R q) = (not p or not q) U (not q).
FormulaPtr nnf(const FormulaPtr& f);

/// Translation into RFOL (applies nnf first). Top-level atoms read x(0);
/// nested operators take windows relative to the enclosing time variable.
/// Until and Release nested under another temporal operator produce a
/// quantifier whose bounds mention two variables, which is outside RFOL.
rfol::FormulaPtr to_rfol(const FormulaPtr& f);

/// Boolean semantics on the trace grid, by direct recursion.
/// p U[a,b] q holds at s iff some t in [s+a, s+b] has q(t) and p on all of [s+a, t].
/// Throws Error(UndefinedFormula) if a window leaves the time domain.
bool holds(const FormulaPtr& f, const Trace& trace);

/// Largest offset from time 0 reached by any window.
double horizon(const Formula& f);

} // namespace rfol::stl
