#pragma once

#include "rfol/ast.hpp"

#include <string>
#include <vector>

namespace rfol {

struct QuantifierShift {
  std::string var;
  Quantifier q;
  double d_t = 0.0;  // time shift (forward references)
  double d_u = 0.0;  // interval shift on top of d_t
};

struct ShiftReport {
  FormulaPtr original;
  FormulaPtr shifted;
  /// One entry per quantifier of `original`, in pre-order.
  std::vector<QuantifierShift> shifts;
  /// Largest constant upper bound of an existential interval in `shifted` (0 if none).
  double horizon_d = 0.0;
  /// Largest time index reachable by `shifted`.
  double required_end = 0.0;
  /// Nodes touched while computing the shift (quantifiers, junctions,
  /// predicates and arithmetic operators, once per sweep).
  std::size_t node_visits = 0;
};

/// Wraps every predicate that reads signals at constant indices in a
/// degenerate quantifier `forall tc in [M, M]` (M the largest such index) and
/// rewrites `f(n)` as `f(tc - (M - n))`.
FormulaPtr normalize_const_index(const FormulaPtr& f);

/// Removes forward references: every quantifier over `t` moves by the largest
/// `n` in a term `t + n` of its body (signal indices and nested bounds).
FormulaPtr time_shift(const FormulaPtr& f);

/// Moves intervals so that each quantifier ends (same kind, reached through
/// junctions of the matching kind) or begins after the nested intervals whose
/// values it consumes. Forward references created on the way are time shifted.
FormulaPtr interval_shift(const FormulaPtr& f);

/// normalize_const_index, time_shift and interval_shift in two sweeps.
/// Throws MixedIndexPredicate if a predicate reads both constant and variable indices.
ShiftReport shift(const FormulaPtr& f);

/// True iff the formula has no constant signal indices, no forward references,
/// and every interval already satisfies the ordering conditions.
bool is_online_checkable(const FormulaPtr& f);

} // namespace rfol
