#pragma once

#include "rfol/ast.hpp"
#include "rfol/trace.hpp"

#include <span>
#include <vector>

namespace rfol {

struct EvalConfig {
  /// Fitness of a strict relation (or !=) that holds with equality.
  double epsilon = 1e-9;
  Interpolation interpolation = Interpolation::Linear;
};

/// Reads RFOL_EPSILON from the environment, falling back to the default.
EvalConfig eval_config_from_env();

/// Times at which a quantifier over the given interval is evaluated: every
/// grid point strictly inside plus each closed endpoint (grid point or not).
std::vector<double> candidate_times(const Trace& trace, double lo, bool lo_closed, double hi,
                                    bool hi_closed);

/// Offline quantitative semantics: predicates through diff, and/forall as
/// min, or/exists as max. Result lies in [-1, 1].
/// Throws Error(UndefinedFormula) when a signal term or interval leaves [0, b]
/// or an arithmetic operator is undefined (division by zero, ...).
double eval(const FormulaPtr& f, const Trace& trace, const EvalConfig& cfg = {});

/// F |= phi iff the fitness is non-negative.
bool holds(const FormulaPtr& f, const Trace& trace, const EvalConfig& cfg = {});

struct DomainCheck {
  bool ok = false;
  /// Smallest domain end b such that every signal index and interval fits in [0, b].
  double required_end = 0.0;
};

struct TimeRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Smallest and largest time index or interval bound any instantiation
/// reaches (0 is always included).
TimeRange reachable_times(const FormulaPtr& f);

/// Reachable signal indices and interval bounds over all instantiations.
/// Throws Error(NegativeIndexReachable) when an index or bound can go below 0.
DomainCheck well_defined(const FormulaPtr& f, double domain_end);

/// Minimum fitness over alternative traces of the same run.
double oracle_offline(const FormulaPtr& f, std::span<const Trace> traces,
                      const EvalConfig& cfg = {});

} // namespace rfol
