#include "rfol/compiler.hpp"

#include "rfol/error.hpp"

#include <json.hpp>

#include <map>
#include <sstream>

namespace rfol {

std::string_view to_string(BlockKind kind) {
  switch (kind) {
  case BlockKind::Input: return "Input";
  case BlockKind::Clock: return "Clock";
  case BlockKind::Const: return "Const";
  case BlockKind::AddSub: return "AddSub";
  case BlockKind::TransportDelay: return "TransportDelay";
  case BlockKind::UnaryFn: return "UnaryFn";
  case BlockKind::BinaryFn: return "BinaryFn";
  case BlockKind::Diff: return "Diff";
  case BlockKind::IntervalGate: return "IntervalGate";
  case BlockKind::RunningMin: return "RunningMin";
  case BlockKind::RunningMax: return "RunningMax";
  case BlockKind::SlidingWindow: return "SlidingWindow";
  }
  return "?";
}

namespace {

class Builder {
public:
  explicit Builder(BlockGraph& g) : g_(g) {}

  int formula(const FormulaPtr& f) {
    return std::visit([&](const auto& node) { return build(f, node); }, f->node);
  }

private:
  int add(Block b) {
    b.id = static_cast<int>(g_.blocks.size());
    g_.blocks.push_back(std::move(b));
    return g_.blocks.back().id;
  }

  int clock() {
    if (clock_ < 0) {
      Block b;
      b.kind = BlockKind::Clock;
      clock_ = add(b);
    }
    return clock_;
  }

  int constant(double v) {
    Block b;
    b.kind = BlockKind::Const;
    b.value = v;
    return add(b);
  }

  int input(const std::string& signal) {
    if (auto it = inputs_.find(signal); it != inputs_.end()) return it->second;
    Block b;
    b.kind = BlockKind::Input;
    b.signal = signal;
    b.label = signal;
    int id = add(b);
    inputs_[signal] = id;
    g_.inputs.push_back(signal);
    return id;
  }

  // Bound expressions: `n` is a Const, `t + n` is Clock + Const.
  int bound(const TimeTerm& tt) {
    if (!tt.has_var()) return constant(tt.n);
    if (tt.signed_offset() == 0.0) return clock();
    Block b;
    b.kind = BlockKind::AddSub;
    b.inputs = {clock(), constant(tt.signed_offset())};
    b.signs = {1, 1};
    b.label = to_string(tt);
    return add(b);
  }

  int term(const SignalTerm& t) {
    return std::visit(
        [&](const auto& node) -> int {
          using T = std::decay_t<decltype(node)>;
          Block b;
          if constexpr (std::is_same_v<T, SignalAt>) {
            if (!node.at.has_var()) {
              throw Error(ErrorCode::NotOnlineCheckable,
                          "constant index in " + to_string(t) + "; shift the formula first");
            }
            const double back = -node.at.signed_offset();
            if (back < 0.0) {
              throw Error(ErrorCode::NotOnlineCheckable, "future reference " + to_string(t));
            }
            int src = input(node.signal);
            if (back == 0.0) return src;
            b.kind = BlockKind::TransportDelay;
            b.inputs = {src};
            b.value = back;
          } else if constexpr (std::is_same_v<T, UnaryTerm>) {
            b.kind = BlockKind::UnaryFn;
            b.unary_op = node.op;
            b.inputs = {term(*node.arg)};
          } else {
            b.kind = BlockKind::BinaryFn;
            b.binary_op = node.op;
            int l = term(*node.lhs);
            int r = term(*node.rhs);
            b.inputs = {l, r};
          }
          b.label = to_string(t);
          return add(b);
        },
        t.node);
  }

  int build(const FormulaPtr& f, const Predicate& p) {
    Block b;
    b.kind = BlockKind::Diff;
    b.inputs = {term(*p.term)};
    b.rel = p.rel;
    b.value = p.bound;
    b.label = to_string(*f);
    return add(b);
  }

  int build(const FormulaPtr& f, const Junction& j) {
    Block b;
    b.kind = BlockKind::BinaryFn;
    b.binary_op = j.op == Junctor::And ? BinaryOp::Min : BinaryOp::Max;
    int l = formula(j.lhs);
    int r = formula(j.rhs);
    b.inputs = {l, r};
    b.label = to_string(*f);
    return add(b);
  }

  int build(const FormulaPtr& f, const Quantified& q) {
    const bool closed = !q.iv.lower.has_var() && !q.iv.upper.has_var();
    const std::string text = to_string(*f);
    if (closed) {
      Block gate;
      gate.kind = BlockKind::IntervalGate;
      int c = clock();
      int lo = bound(q.iv.lower);
      int hi = bound(q.iv.upper);
      int body = formula(q.body);
      gate.inputs = {c, lo, hi, body};
      gate.lo_closed = q.iv.lower_closed;
      gate.hi_closed = q.iv.upper_closed;
      gate.q = q.q;
      gate.label = text;
      int g = add(gate);
      Block reg;
      reg.kind = q.q == Quantifier::Forall ? BlockKind::RunningMin : BlockKind::RunningMax;
      reg.inputs = {g};
      reg.label = text;
      return add(reg);
    }

    const bool body_over_var = free_time_vars(*q.body).count(q.var) > 0;
    Block win;
    win.kind = BlockKind::SlidingWindow;
    win.lo_closed = q.iv.lower_closed;
    win.hi_closed = q.iv.upper_closed;
    win.hi_fixed = !q.iv.upper.has_var();
    win.q = q.q;
    int c = clock();
    int lo = bound(q.iv.lower);
    int hi = bound(q.iv.upper);
    if (body_over_var) {
      int body = formula(q.body);
      win.inputs = {c, lo, hi, body};
      win.label = text;
      return add(win);
    }
    // The body does not depend on the bound variable: its value applies as
    // soon as the window holds a sample, the neutral element otherwise.
    int body = formula(q.body);
    int marker = constant(q.q == Quantifier::Forall ? -1.0 : 1.0);
    win.inputs = {c, lo, hi, marker};
    win.label = "nonempty " + to_string(q.iv);
    int w = add(win);
    Block comb;
    comb.kind = BlockKind::BinaryFn;
    comb.binary_op = q.q == Quantifier::Forall ? BinaryOp::Max : BinaryOp::Min;
    comb.inputs = {body, w};
    comb.label = text;
    return add(comb);
  }

  BlockGraph& g_;
  int clock_ = -1;
  std::map<std::string, int> inputs_;
};

} // namespace

BlockGraph compile(const ShiftReport& report, const std::set<std::string>& signals,
                   const CompileOptions& opts) {
  const FormulaPtr& f = report.shifted;
  if (!is_online_checkable(f)) {
    throw Error(ErrorCode::NotOnlineCheckable, to_string(*f));
  }
  for (const auto& s : signals_used(*f)) {
    if (!signals.count(s)) throw Error(ErrorCode::UndeclaredSignal, "signal '" + s + "'");
  }
  BlockGraph g;
  g.horizon_d = report.horizon_d;
  g.required_end = report.required_end;
  g.epsilon = opts.epsilon;
  g.formula = to_string(*f);
  Builder b(g);
  g.output = b.formula(f);
  return g;
}

BlockGraph compile(const ShiftReport& report, const Spec& spec, const CompileOptions& opts) {
  return compile(report, spec.decls.scalar_signals(), opts);
}

GraphStats graph_stats(const BlockGraph& g) {
  GraphStats s;
  s.blocks = g.blocks.size();
  for (const auto& b : g.blocks) s.connections += b.inputs.size();
  return s;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string describe(const Block& b) {
  std::string s(to_string(b.kind));
  switch (b.kind) {
  case BlockKind::Input: s += " " + b.signal; break;
  case BlockKind::Const: s += " " + format_number(b.value); break;
  case BlockKind::TransportDelay: s += " " + format_number(b.value); break;
  case BlockKind::UnaryFn: s += " " + std::string(to_string(b.unary_op)); break;
  case BlockKind::BinaryFn: s += " " + std::string(to_string(b.binary_op)); break;
  case BlockKind::Diff: s += " " + std::string(to_string(b.rel)) + " " + format_number(b.value); break;
  case BlockKind::IntervalGate:
  case BlockKind::SlidingWindow:
    s += std::string(" ") + (b.lo_closed ? "[" : "(") + "lo, hi" + (b.hi_closed ? "]" : ")") +
         (b.q == Quantifier::Forall ? " min" : " max");
    break;
  default: break;
  }
  return s;
}

} // namespace

std::string export_dot(const BlockGraph& g) {
  std::ostringstream out;
  out << "digraph rfol {\n  rankdir=LR;\n";
  for (const auto& b : g.blocks) {
    out << "  b" << b.id << " [label=\"" << dot_escape(describe(b)) << "\"";
    if (b.id == g.output) out << ", peripheries=2";
    out << "];\n";
  }
  for (const auto& b : g.blocks) {
    for (std::size_t port = 0; port < b.inputs.size(); ++port) {
      out << "  b" << b.inputs[port] << " -> b" << b.id << " [headlabel=\"" << port << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

namespace {

using nlohmann::json;

template <typename E, std::size_t N>
E enum_from(const std::string& text, const E (&values)[N]) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown name '" + text + "' in block graph");
}

constexpr BlockKind kKinds[] = {BlockKind::Input,        BlockKind::Clock,      BlockKind::Const,
                                BlockKind::AddSub,       BlockKind::TransportDelay,
                                BlockKind::UnaryFn,      BlockKind::BinaryFn,   BlockKind::Diff,
                                BlockKind::IntervalGate, BlockKind::RunningMin, BlockKind::RunningMax,
                                BlockKind::SlidingWindow};
constexpr UnaryOp kUnary[] = {UnaryOp::Neg, UnaryOp::Abs, UnaryOp::Sin,
                              UnaryOp::Cos, UnaryOp::Sqrt, UnaryOp::Exp};
constexpr BinaryOp kBinary[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
                                BinaryOp::Min, BinaryOp::Max, BinaryOp::Pow};
constexpr Rel kRels[] = {Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge, Rel::Eq, Rel::Ne};

std::size_t ports(BlockKind k) {
  switch (k) {
  case BlockKind::Input:
  case BlockKind::Clock:
  case BlockKind::Const: return 0;
  case BlockKind::TransportDelay:
  case BlockKind::UnaryFn:
  case BlockKind::Diff:
  case BlockKind::RunningMin:
  case BlockKind::RunningMax: return 1;
  case BlockKind::BinaryFn: return 2;
  case BlockKind::IntervalGate:
  case BlockKind::SlidingWindow: return 4;
  case BlockKind::AddSub: return 0;
  }
  return 0;
}

} // namespace

std::string to_json(const BlockGraph& g) {
  json blocks = json::array();
  for (const auto& b : g.blocks) {
    json j;
    j["id"] = b.id;
    j["kind"] = std::string(to_string(b.kind));
    j["inputs"] = b.inputs;
    switch (b.kind) {
    case BlockKind::Input: j["signal"] = b.signal; break;
    case BlockKind::Const: j["value"] = b.value; break;
    case BlockKind::AddSub: j["signs"] = b.signs; break;
    case BlockKind::TransportDelay: j["delay"] = b.value; break;
    case BlockKind::UnaryFn: j["op"] = std::string(to_string(b.unary_op)); break;
    case BlockKind::BinaryFn: j["op"] = std::string(to_string(b.binary_op)); break;
    case BlockKind::Diff:
      j["rel"] = std::string(to_string(b.rel));
      j["bound"] = b.value;
      break;
    case BlockKind::SlidingWindow: j["hi_fixed"] = b.hi_fixed; [[fallthrough]];
    case BlockKind::IntervalGate:
      j["lo_closed"] = b.lo_closed;
      j["hi_closed"] = b.hi_closed;
      j["neutral"] = b.neutral();
      break;
    default: break;
    }
    if (!b.label.empty()) j["label"] = b.label;
    blocks.push_back(std::move(j));
  }
  json out;
  out["schema_version"] = 1;
  out["formula"] = g.formula;
  out["inputs"] = g.inputs;
  out["output"] = g.output;
  out["horizon_d"] = g.horizon_d;
  out["required_end"] = g.required_end;
  out["epsilon"] = g.epsilon;
  out["blocks"] = std::move(blocks);
  return out.dump(2) + "\n";
}

BlockGraph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("block graph JSON: ") + e.what());
  }
  try {
    BlockGraph g;
    g.formula = j.value("formula", "");
    g.inputs = j.at("inputs").get<std::vector<std::string>>();
    g.output = j.at("output").get<int>();
    g.horizon_d = j.at("horizon_d").get<double>();
    g.required_end = j.at("required_end").get<double>();
    g.epsilon = j.at("epsilon").get<double>();
    for (const auto& jb : j.at("blocks")) {
      Block b;
      b.id = jb.at("id").get<int>();
      if (b.id != static_cast<int>(g.blocks.size())) {
        throw Error(ErrorCode::InvalidArgument, "block ids must be 0, 1, 2, ... in order");
      }
      b.kind = enum_from(jb.at("kind").get<std::string>(), kKinds);
      b.inputs = jb.at("inputs").get<std::vector<int>>();
      for (int src : b.inputs) {
        if (src < 0 || src >= b.id) {
          throw Error(ErrorCode::InvalidArgument,
                      "block " + std::to_string(b.id) + " reads a later or missing block");
        }
      }
      switch (b.kind) {
      case BlockKind::Input: b.signal = jb.at("signal").get<std::string>(); break;
      case BlockKind::Const: b.value = jb.at("value").get<double>(); break;
      case BlockKind::AddSub: b.signs = jb.at("signs").get<std::vector<int>>(); break;
      case BlockKind::TransportDelay: b.value = jb.at("delay").get<double>(); break;
      case BlockKind::UnaryFn: b.unary_op = enum_from(jb.at("op").get<std::string>(), kUnary); break;
      case BlockKind::BinaryFn: b.binary_op = enum_from(jb.at("op").get<std::string>(), kBinary); break;
      case BlockKind::Diff:
        b.rel = enum_from(jb.at("rel").get<std::string>(), kRels);
        b.value = jb.at("bound").get<double>();
        break;
      case BlockKind::SlidingWindow: b.hi_fixed = jb.at("hi_fixed").get<bool>(); [[fallthrough]];
      case BlockKind::IntervalGate:
        b.lo_closed = jb.at("lo_closed").get<bool>();
        b.hi_closed = jb.at("hi_closed").get<bool>();
        b.q = jb.at("neutral").get<double>() > 0 ? Quantifier::Forall : Quantifier::Exists;
        break;
      default: break;
      }
      const std::size_t expected =
          b.kind == BlockKind::AddSub ? b.signs.size() : ports(b.kind);
      if (b.inputs.size() != expected) {
        throw Error(ErrorCode::InvalidArgument,
                    "block " + std::to_string(b.id) + " has " + std::to_string(b.inputs.size()) +
                        " inputs, expected " + std::to_string(expected));
      }
      if (b.kind == BlockKind::TransportDelay && !(b.value >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "negative transport delay");
      }
      b.label = jb.value("label", "");
      g.blocks.push_back(std::move(b));
    }
    if (g.output < 0 || g.output >= static_cast<int>(g.blocks.size())) {
      throw Error(ErrorCode::InvalidArgument, "graph output is not a block");
    }
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("block graph JSON: ") + e.what());
  }
}

} // namespace rfol
