#include "rfol/shifting.hpp"

#include "rfol/error.hpp"
#include "rfol/semantics.hpp"

#include <algorithm>
#include <unordered_map>

namespace rfol {

namespace {

// A finished interval whose value a quantifier reads: the reading quantifier
// must not look at it before `end`.
struct Dep {
  double end;
  bool end_closed;
  Quantifier q;
  bool window;   // relative lower bound, constant upper bound
  bool all_and;  // every junction on the path is a conjunction
  bool all_or;
};

struct Summary {
  // Largest offset `n` over references `v + n`, per referenced variable.
  std::vector<std::pair<std::string, double>> refs;
  std::vector<Dep> deps;

  void ref(const std::string& var, double n) {
    for (auto& [name, m] : refs) {
      if (name == var) {
        m = std::max(m, n);
        return;
      }
    }
    refs.emplace_back(var, n);
  }
  const double* find(const std::string& var) const {
    for (const auto& [name, m] : refs) {
      if (name == var) return &m;
    }
    return nullptr;
  }
};

struct NodeShift {
  double d_t = 0.0;
  double total = 0.0;
};

enum class Mode { TimeOnly, Full };

void collect_indices(const SignalTerm& t, std::vector<const TimeTerm*>& out, std::size_t& visits) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SignalAt>) {
          out.push_back(&node.at);
        } else if constexpr (std::is_same_v<T, UnaryTerm>) {
          ++visits;
          collect_indices(*node.arg, out, visits);
        } else {
          ++visits;
          collect_indices(*node.lhs, out, visits);
          collect_indices(*node.rhs, out, visits);
        }
      },
      t.node);
}

class Analysis {
public:
  explicit Analysis(Mode mode) : mode_(mode) {}

  void run(const FormulaPtr& f) { formula(f); }

  const NodeShift* at(const Formula* f) const {
    auto it = shifts_.find(f);
    return it == shifts_.end() ? nullptr : &it->second;
  }
  const std::set<std::string>& names() const { return names_; }
  std::size_t visits = 0;

private:
  struct Frame {
    std::string var;
    double lo;
    double hi;
  };

  double base_lo(const TimeTerm& tt) const {
    if (!tt.has_var()) return tt.n;
    return frame(tt.var).lo + tt.signed_offset();
  }
  double base_hi(const TimeTerm& tt) const {
    if (!tt.has_var()) return tt.n;
    return frame(tt.var).hi + tt.signed_offset();
  }
  const Frame& frame(const std::string& var) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->var == var) return *it;
    }
    throw Error(ErrorCode::Condition1Violation, "free time variable " + var);
  }

  Summary formula(const FormulaPtr& f) {
    ++visits;
    return std::visit([&](const auto& node) { return eval_node(f, node); }, f->node);
  }

  Summary eval_node(const FormulaPtr&, const Predicate& p) {
    std::vector<const TimeTerm*> indices;
    collect_indices(*p.term, indices, visits);
    Summary s;
    bool has_const = false;
    bool has_var = false;
    double max_const = 0.0;
    for (const TimeTerm* tt : indices) {
      if (tt->has_var()) {
        has_var = true;
        s.ref(tt->var, tt->signed_offset());
        names_.insert(tt->var);
      } else {
        max_const = has_const ? std::max(max_const, tt->n) : tt->n;
        has_const = true;
      }
    }
    if (has_const && has_var) {
      throw Error(ErrorCode::MixedIndexPredicate,
                  "predicate reads both constant and variable time indices: " +
                      to_string(*p.term));
    }
    if (has_const) {
      // Behaves like `forall tc in [M, M]`, a finished interval ending at M.
      s.deps.push_back(Dep{max_const, true, Quantifier::Forall, false, true, true});
    }
    return s;
  }

  Summary eval_node(const FormulaPtr&, const Junction& j) {
    Summary s = formula(j.lhs);
    Summary r = formula(j.rhs);
    for (const auto& [var, n] : r.refs) s.ref(var, n);
    s.deps.insert(s.deps.end(), r.deps.begin(), r.deps.end());
    for (auto& d : s.deps) {
      d.all_and = d.all_and && j.op == Junctor::And;
      d.all_or = d.all_or && j.op == Junctor::Or;
    }
    return s;
  }

  Summary eval_node(const FormulaPtr& f, const Quantified& q) {
    names_.insert(q.var);
    const bool closed = !q.iv.lower.has_var() && !q.iv.upper.has_var();
    const double lo = base_lo(q.iv.lower);
    const double hi = base_hi(q.iv.upper);
    env_.push_back(Frame{q.var, lo, hi});
    Summary body = formula(q.body);
    env_.pop_back();

    const double* own = body.find(q.var);
    const bool reads_body_over_var = closed || own != nullptr;
    NodeShift ns;
    ns.d_t = own ? std::max(0.0, *own) : 0.0;
    ns.total = ns.d_t;

    Summary s;
    for (const auto& [var, n] : body.refs) {
      if (var != q.var) s.ref(var, n);
    }
    if (reads_body_over_var) {
      if (mode_ == Mode::Full) {
        for (const Dep& d : body.deps) ns.total = std::max(ns.total, needed(q, closed, lo, hi, d));
      }
    } else {
      for (Dep d : body.deps) {
        d.all_and = d.all_or = false;
        s.deps.push_back(d);
      }
    }
    shifts_[f.get()] = ns;

    for (const TimeTerm* b : {&q.iv.lower, &q.iv.upper}) {
      if (b->has_var()) s.ref(b->var, b->signed_offset() + ns.total);
    }
    if (closed) {
      s.deps.push_back(Dep{q.iv.upper.n + ns.total, q.iv.upper_closed, q.q, false, true, true});
    } else if (!q.iv.upper.has_var()) {
      s.deps.push_back(Dep{q.iv.upper.n + ns.total, q.iv.upper_closed, q.q, true, true, true});
    }
    return s;
  }

  // Smallest shift of the reading quantifier that lets it see the final value of `d`.
  static double needed(const Quantified& q, bool closed, double lo, double hi, const Dep& d) {
    const bool same_path = q.q == Quantifier::Forall ? d.all_and : d.all_or;
    if (closed && !d.window && d.q == q.q && same_path &&
        (q.iv.upper_closed || !d.end_closed)) {
      // The register of a same-kind inner interval only moves toward the
      // outer aggregate, so reading it at the last outer instant is enough.
      return d.end - hi;
    }
    return d.end - lo;
  }

  Mode mode_;
  std::vector<Frame> env_;
  std::unordered_map<const Formula*, NodeShift> shifts_;
  std::set<std::string> names_;
};

class Apply {
public:
  Apply(const Analysis& a, bool wrap_constants) : a_(a), wrap_(wrap_constants), used_(a.names()) {}

  FormulaPtr formula(const FormulaPtr& f) {
    ++visits;
    return std::visit([&](const auto& node) { return rebuild(f, node); }, f->node);
  }

  std::vector<QuantifierShift> shifts;
  double horizon = 0.0;
  std::size_t visits = 0;

private:
  double shift_of(const std::string& var) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == var) return it->second;
    }
    return 0.0;
  }

  TimeTerm index(const TimeTerm& tt) const {
    if (!tt.has_var()) return tt;
    return TimeTerm::offset(tt.var, tt.signed_offset() - shift_of(tt.var));
  }

  SignalTermPtr term(const SignalTermPtr& t, const std::string& fresh, double top) {
    return std::visit(
        [&](const auto& node) -> SignalTermPtr {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SignalAt>) {
            if (!node.at.has_var() && !fresh.empty()) {
              return signal_at(node.signal, TimeTerm::offset(fresh, node.at.n - top));
            }
            return signal_at(node.signal, index(node.at));
          } else if constexpr (std::is_same_v<T, UnaryTerm>) {
            ++visits;
            return unary(node.op, term(node.arg, fresh, top));
          } else {
            ++visits;
            return binary(node.op, term(node.lhs, fresh, top), term(node.rhs, fresh, top));
          }
        },
        t->node);
  }

  static void constant_indices(const SignalTerm& t, bool& any, double& top) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SignalAt>) {
            if (!node.at.has_var()) {
              top = any ? std::max(top, node.at.n) : node.at.n;
              any = true;
            }
          } else if constexpr (std::is_same_v<T, UnaryTerm>) {
            constant_indices(*node.arg, any, top);
          } else {
            constant_indices(*node.lhs, any, top);
            constant_indices(*node.rhs, any, top);
          }
        },
        t.node);
  }

  std::string fresh_name() {
    for (;;) {
      std::string name = "tc" + std::to_string(++fresh_);
      if (used_.insert(name).second) return name;
    }
  }

  FormulaPtr rebuild(const FormulaPtr&, const Predicate& p) {
    bool any = false;
    double top = 0.0;
    if (wrap_) constant_indices(*p.term, any, top);
    if (!any) return predicate(term(p.term, {}, 0.0), p.rel, p.bound);
    std::string var = fresh_name();
    auto body = predicate(term(p.term, var, top), p.rel, p.bound);
    return forall(var, closed_interval(top, top), body);
  }

  FormulaPtr rebuild(const FormulaPtr&, const Junction& j) {
    auto lhs = formula(j.lhs);
    auto rhs = formula(j.rhs);
    return j.op == Junctor::And ? conj(lhs, rhs) : disj(lhs, rhs);
  }

  FormulaPtr rebuild(const FormulaPtr& f, const Quantified& q) {
    const NodeShift* ns = a_.at(f.get());
    const double d = ns ? ns->total : 0.0;
    shifts.push_back(QuantifierShift{q.var, q.q, ns ? ns->d_t : 0.0, ns ? ns->total - ns->d_t : 0.0});
    Interval iv = q.iv;
    auto move = [&](const TimeTerm& b) {
      return b.has_var() ? TimeTerm::offset(b.var, b.signed_offset() - shift_of(b.var) + d)
                         : TimeTerm::constant(b.n + d);
    };
    iv.lower = move(q.iv.lower);
    iv.upper = move(q.iv.upper);
    if (q.q == Quantifier::Exists && !iv.upper.has_var()) horizon = std::max(horizon, iv.upper.n);
    env_.emplace_back(q.var, d);
    auto body = formula(q.body);
    env_.pop_back();
    return quantified(q.q, q.var, iv, body);
  }

  const Analysis& a_;
  bool wrap_;
  std::set<std::string> used_;
  std::vector<std::pair<std::string, double>> env_;
  int fresh_ = 0;
};

void collect_names(const Formula& f, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Quantified>) {
          out.insert(node.var);
          collect_names(*node.body, out);
        } else if constexpr (std::is_same_v<T, Junction>) {
          collect_names(*node.lhs, out);
          collect_names(*node.rhs, out);
        }
      },
      f.node);
  auto fv = free_time_vars(f);
  out.insert(fv.begin(), fv.end());
}

bool has_const_index(const SignalTerm& t) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SignalAt>) {
          return !node.at.has_var();
        } else if constexpr (std::is_same_v<T, UnaryTerm>) {
          return has_const_index(*node.arg);
        } else {
          return has_const_index(*node.lhs) || has_const_index(*node.rhs);
        }
      },
      t.node);
}

bool has_const_index(const Formula& f) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return has_const_index(*node.term);
        } else if constexpr (std::is_same_v<T, Junction>) {
          return has_const_index(*node.lhs) || has_const_index(*node.rhs);
        } else {
          return has_const_index(*node.body);
        }
      },
      f.node);
}

// Wraps each constant-index predicate in `forall tc in [M, M]`, M its largest index.
class Normalizer {
public:
  explicit Normalizer(std::set<std::string> used) : used_(std::move(used)) {}

  FormulaPtr formula(const FormulaPtr& f) {
    return std::visit(
        [&](const auto& node) -> FormulaPtr {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Predicate>) {
            if (!has_const_index(*node.term)) return f;
            if (!free_time_vars(*node.term).empty()) {
              throw Error(ErrorCode::MixedIndexPredicate,
                          "predicate reads both constant and variable time indices: " +
                              to_string(*node.term));
            }
            double top = 0.0;
            max_const(*node.term, top);
            std::string var;
            do {
              var = "tc" + std::to_string(++fresh_);
            } while (!used_.insert(var).second);
            return forall(var, closed_interval(top, top),
                          predicate(rewrite(node.term, var, top), node.rel, node.bound));
          } else if constexpr (std::is_same_v<T, Junction>) {
            auto lhs = formula(node.lhs);
            auto rhs = formula(node.rhs);
            return node.op == Junctor::And ? conj(lhs, rhs) : disj(lhs, rhs);
          } else {
            return quantified(node.q, node.var, node.iv, formula(node.body));
          }
        },
        f->node);
  }

private:
  static void max_const(const SignalTerm& t, double& top) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SignalAt>) {
            if (!node.at.has_var()) top = std::max(top, node.at.n);
          } else if constexpr (std::is_same_v<T, UnaryTerm>) {
            max_const(*node.arg, top);
          } else {
            max_const(*node.lhs, top);
            max_const(*node.rhs, top);
          }
        },
        t.node);
  }

  static SignalTermPtr rewrite(const SignalTermPtr& t, const std::string& var, double top) {
    return std::visit(
        [&](const auto& node) -> SignalTermPtr {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SignalAt>) {
            if (node.at.has_var()) return t;
            return signal_at(node.signal, TimeTerm::offset(var, node.at.n - top));
          } else if constexpr (std::is_same_v<T, UnaryTerm>) {
            return unary(node.op, rewrite(node.arg, var, top));
          } else {
            return binary(node.op, rewrite(node.lhs, var, top), rewrite(node.rhs, var, top));
          }
        },
        t->node);
  }

  std::set<std::string> used_;
  int fresh_ = 0;
};

FormulaPtr apply_shift(const FormulaPtr& f, Mode mode) {
  Analysis a(mode);
  a.run(f);
  Apply ap(a, false);
  return ap.formula(f);
}

bool all_zero(const Analysis& a, const Formula& f) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return true;
        } else if constexpr (std::is_same_v<T, Junction>) {
          return all_zero(a, *node.lhs) && all_zero(a, *node.rhs);
        } else {
          const NodeShift* ns = a.at(&f);
          if (ns && ns->total != 0.0) return false;
          if (node.iv.lower.kind == TimeTerm::Kind::Plus) return false;
          if (node.iv.upper.kind == TimeTerm::Kind::Plus) return false;
          return all_zero(a, *node.body);
        }
      },
      f.node);
}

} // namespace

FormulaPtr normalize_const_index(const FormulaPtr& f) {
  std::set<std::string> used;
  collect_names(*f, used);
  return Normalizer(std::move(used)).formula(f);
}

FormulaPtr time_shift(const FormulaPtr& f) { return apply_shift(f, Mode::TimeOnly); }

FormulaPtr interval_shift(const FormulaPtr& f) { return apply_shift(f, Mode::Full); }

ShiftReport shift(const FormulaPtr& f) {
  Analysis a(Mode::Full);
  a.run(f);
  Apply ap(a, true);
  ShiftReport r;
  r.original = f;
  r.shifted = ap.formula(f);
  r.shifts = std::move(ap.shifts);
  r.horizon_d = ap.horizon;
  r.node_visits = a.visits + ap.visits;
  r.required_end = reachable_times(r.shifted).hi;
  return r;
}

bool is_online_checkable(const FormulaPtr& f) {
  if (has_const_index(*f)) return false;
  Analysis a(Mode::Full);
  try {
    a.run(f);
  } catch (const Error&) {
    return false;
  }
  return all_zero(a, *f);
}

} // namespace rfol
