#include "rfol/semantics.hpp"

#include "rfol/error.hpp"
#include "rfol/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <unordered_map>

namespace rfol {

EvalConfig eval_config_from_env() {
  EvalConfig cfg;
  if (const char* env = std::getenv("RFOL_EPSILON")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0 && v < 1.0) cfg.epsilon = v;
  }
  return cfg;
}

std::vector<double> candidate_times(const Trace& trace, double lo, bool lo_closed, double hi,
                                    bool hi_closed) {
  std::vector<double> out;
  if (lo > hi || (lo == hi && !(lo_closed && hi_closed))) return out;
  auto times = trace.times();
  if (lo_closed) out.push_back(lo);
  auto it = std::upper_bound(times.begin(), times.end(), lo);
  for (; it != times.end() && *it < hi; ++it) out.push_back(*it);
  if (hi_closed && hi != lo) out.push_back(hi);
  return out;
}

namespace {

class Evaluator {
public:
  Evaluator(const Trace& trace, const EvalConfig& cfg) : trace_(trace), cfg_(cfg) {}

  double formula(const FormulaPtr& f) {
    const bool is_closed = closed(f);
    if (is_closed) {
      if (auto it = cache_.find(f.get()); it != cache_.end()) return it->second;
    }
    double v = std::visit([&](const auto& node) { return eval_node(node); }, f->node);
    if (is_closed) cache_.emplace(f.get(), v);
    return v;
  }

private:
  double eval_node(const Predicate& p) {
    double lhs = term(*p.term);
    if (std::isnan(lhs)) {
      throw Error(ErrorCode::UndefinedFormula,
                  "arithmetic undefined in " + to_string(*p.term) + bindings());
    }
    return diff(p.rel, lhs, p.bound, cfg_.epsilon);
  }

  double eval_node(const Junction& j) {
    double a = formula(j.lhs);
    double b = formula(j.rhs);
    return j.op == Junctor::And ? std::min(a, b) : std::max(a, b);
  }

  double eval_node(const Quantified& q) {
    const double lo = time(q.iv.lower);
    const double hi = time(q.iv.upper);
    if (lo < 0.0 || hi > trace_.domain_end()) {
      throw Error(ErrorCode::UndefinedFormula,
                  "interval " + format_number(lo) + ".." + format_number(hi) + " of " + q.var +
                      " leaves the time domain [0, " + format_number(trace_.domain_end()) + "]" +
                      bindings());
    }
    const bool is_forall = q.q == Quantifier::Forall;
    double acc = is_forall ? 1.0 : -1.0;
    env_.emplace_back(q.var, 0.0);
    for (double t : candidate_times(trace_, lo, q.iv.lower_closed, hi, q.iv.upper_closed)) {
      env_.back().second = t;
      double v = formula(q.body);
      acc = is_forall ? std::min(acc, v) : std::max(acc, v);
    }
    env_.pop_back();
    return acc;
  }

  double term(const SignalTerm& t) {
    return std::visit(
        [&](const auto& node) -> double {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SignalAt>) {
            const double at = time(node.at);
            auto col = trace_.signal_index(node.signal);
            if (!col || at < 0.0 || at > trace_.domain_end()) {
              throw Error(ErrorCode::UndefinedFormula,
                          "signal term " + node.signal + "(" + format_number(at) +
                              ") is undefined" + bindings());
            }
            return trace_.sample(*col, at, cfg_.interpolation);
          } else if constexpr (std::is_same_v<T, UnaryTerm>) {
            return apply(node.op, term(*node.arg));
          } else {
            return apply(node.op, term(*node.lhs), term(*node.rhs));
          }
        },
        t.node);
  }

  double time(const TimeTerm& tt) const {
    if (!tt.has_var()) return tt.n;
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == tt.var) return tt.instantiate(it->second);
    }
    throw Error(ErrorCode::UndefinedFormula, "free time variable " + tt.var);
  }

  bool closed(const FormulaPtr& f) {
    if (auto it = closed_.find(f.get()); it != closed_.end()) return it->second;
    bool c = free_time_vars(*f).empty();
    closed_.emplace(f.get(), c);
    return c;
  }

  std::string bindings() const {
    if (env_.empty()) return {};
    std::string out = " with";
    for (const auto& [name, value] : env_) out += " " + name + "=" + format_number(value);
    return out;
  }

  const Trace& trace_;
  const EvalConfig& cfg_;
  std::vector<std::pair<std::string, double>> env_;
  std::unordered_map<const Formula*, double> cache_;
  std::unordered_map<const Formula*, bool> closed_;
};

// Reachable range of a time variable: [lo, hi] over all instantiations.
struct Range {
  double lo;
  double hi;
};

struct DomainScan {
  double max_reached = 0.0;
  double min_reached = 0.0;
  std::vector<std::pair<std::string, Range>> env;

  Range range(const TimeTerm& tt) const {
    if (!tt.has_var()) return {tt.n, tt.n};
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == tt.var) {
        return {tt.instantiate(it->second.lo), tt.instantiate(it->second.hi)};
      }
    }
    throw Error(ErrorCode::Condition1Violation, "free time variable " + tt.var);
  }

  void touch(Range r) {
    max_reached = std::max(max_reached, r.hi);
    min_reached = std::min(min_reached, r.lo);
  }

  void term(const SignalTerm& t) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SignalAt>) {
            touch(range(node.at));
          } else if constexpr (std::is_same_v<T, UnaryTerm>) {
            term(*node.arg);
          } else {
            term(*node.lhs);
            term(*node.rhs);
          }
        },
        t.node);
  }

  void formula(const Formula& f) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Predicate>) {
            term(*node.term);
          } else if constexpr (std::is_same_v<T, Junction>) {
            formula(*node.lhs);
            formula(*node.rhs);
          } else {
            Range lower = range(node.iv.lower);
            Range upper = range(node.iv.upper);
            touch({lower.lo, upper.hi});
            env.emplace_back(node.var, Range{lower.lo, upper.hi});
            formula(*node.body);
            env.pop_back();
          }
        },
        f.node);
  }
};

} // namespace

double eval(const FormulaPtr& f, const Trace& trace, const EvalConfig& cfg) {
  Evaluator ev(trace, cfg);
  return ev.formula(f);
}

bool holds(const FormulaPtr& f, const Trace& trace, const EvalConfig& cfg) {
  return eval(f, trace, cfg) >= 0.0;
}

TimeRange reachable_times(const FormulaPtr& f) {
  DomainScan scan;
  scan.formula(*f);
  return TimeRange{scan.min_reached, scan.max_reached};
}

DomainCheck well_defined(const FormulaPtr& f, double domain_end) {
  DomainScan scan;
  scan.formula(*f);
  if (scan.min_reached < 0.0) {
    throw Error(ErrorCode::NegativeIndexReachable,
                "time index " + format_number(scan.min_reached) + " is reachable in " +
                    to_string(*f));
  }
  return DomainCheck{scan.max_reached <= domain_end, scan.max_reached};
}

double oracle_offline(const FormulaPtr& f, std::span<const Trace> traces, const EvalConfig& cfg) {
  if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "oracle needs at least one trace");
  const double b = traces.front().domain_end();
  double out = std::numeric_limits<double>::infinity();
  for (const auto& tr : traces) {
    if (tr.domain_end() != b) {
      throw Error(ErrorCode::InvalidArgument, "traces of one bundle must share the domain end");
    }
    out = std::min(out, eval(f, tr, cfg));
  }
  return out;
}

} // namespace rfol
