#pragma once

#include "rfol/ast.hpp"
#include "rfol/parser.hpp"
#include "rfol/shifting.hpp"

#include <set>
#include <string>
#include <vector>

namespace rfol {

enum class BlockKind {
  Input,           // signal entry point
  Clock,           // current step time
  Const,           // value
  AddSub,          // sum of inputs weighted by signs
  TransportDelay,  // input at (t - delay)
  UnaryFn,
  BinaryFn,        // also min/max for and/or
  Diff,            // diff(rel, input, bound)
  IntervalGate,    // inputs clock, lo, hi, body: body inside the interval, neutral outside
  RunningMin,      // min of input over all steps so far, register starts at +1
  RunningMax,      // max of input over all steps so far, register starts at -1
  SlidingWindow,   // inputs clock, lo, hi, body: min/max of body samples with time in [lo, hi]
};

std::string_view to_string(BlockKind kind);

struct Block {
  int id = 0;
  BlockKind kind = BlockKind::Const;
  std::vector<int> inputs;  // one source block per input port

  std::string signal;       // Input
  double value = 0.0;       // Const value, TransportDelay delay, Diff bound
  std::vector<int> signs;   // AddSub
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  Rel rel = Rel::Lt;        // Diff
  bool lo_closed = true;    // IntervalGate, SlidingWindow
  bool hi_closed = true;
  bool hi_fixed = false;    // SlidingWindow: upper bound is a constant
  Quantifier q = Quantifier::Forall;  // IntervalGate, SlidingWindow: neutral +1 / -1
  std::string label;        // sub-formula the block computes, for diagnostics

  double neutral() const { return q == Quantifier::Forall ? 1.0 : -1.0; }
};

struct BlockGraph {
  /// Topologically ordered: every input of block i has a smaller id.
  std::vector<Block> blocks;
  std::vector<std::string> inputs;  // signal names, one Input block each
  int output = -1;
  double horizon_d = 0.0;
  double required_end = 0.0;
  double epsilon = 1e-9;
  std::string formula;              // shifted formula text
};

struct CompileOptions {
  double epsilon = 1e-9;
};

/// Builds the block network of a shifted formula by structural induction.
/// Throws NotOnlineCheckable or UndeclaredSignal.
BlockGraph compile(const ShiftReport& report, const std::set<std::string>& signals,
                   const CompileOptions& opts = {});
BlockGraph compile(const ShiftReport& report, const Spec& spec, const CompileOptions& opts = {});

struct GraphStats {
  std::size_t blocks = 0;
  std::size_t connections = 0;
};

GraphStats graph_stats(const BlockGraph& g);

/// Graphviz text with stable node names `b<id>`.
std::string export_dot(const BlockGraph& g);

std::string to_json(const BlockGraph& g);
/// Inverse of to_json; checks ids, port counts and ordering.
BlockGraph graph_from_json(const std::string& text);

} // namespace rfol
