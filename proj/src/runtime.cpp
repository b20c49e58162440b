#include "rfol/runtime.hpp"

#include "rfol/error.hpp"
#include "rfol/ops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

namespace rfol {

std::string_view to_string(Verdict::Kind kind) {
  switch (kind) {
  case Verdict::Kind::Running: return "running";
  case Verdict::Kind::Stopped: return "stopped";
  case Verdict::Kind::Finished: return "finished";
  }
  return "?";
}

Monitor::Monitor(const BlockGraph& graph, MonitorConfig cfg)
    : graph_(graph),
      cfg_(std::move(cfg)),
      horizon_(cfg_.horizon.value_or(graph.horizon_d)),
      input_slot_(graph.blocks.size(), -1),
      out_(graph.blocks.size(), 0.0),
      state_(graph.blocks.size()) {
  if (!(cfg_.threshold >= -1.0 && cfg_.threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in [-1, 1]");
  }
  if (!(horizon_ >= 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be non-negative");
  if (graph.output < 0 || graph.output >= static_cast<int>(graph.blocks.size())) {
    throw Error(ErrorCode::InvalidArgument, "graph has no output block");
  }
  for (const auto& b : graph.blocks) {
    if (b.kind == BlockKind::Input) {
      auto it = std::find(graph.inputs.begin(), graph.inputs.end(), b.signal);
      if (it == graph.inputs.end()) {
        throw Error(ErrorCode::InvalidArgument, "input block for undeclared signal " + b.signal);
      }
      input_slot_[b.id] = static_cast<int>(it - graph.inputs.begin());
    } else if (b.kind == BlockKind::RunningMin) {
      state_[b.id].reg = 1.0;
    } else if (b.kind == BlockKind::RunningMax) {
      state_[b.id].reg = -1.0;
    }
  }
  verdict_.e = 1.0;
}

double Monitor::delay(State& s, double t, double in, double d) const {
  auto& h = s.history;
  h.emplace_back(t, in);
  const double q = t - d;
  if (q < h.front().first) return cfg_.delay_initial;
  // Keep exactly one sample at or before q; later queries only move forward.
  while (h.size() > 1 && h[1].first <= q) h.pop_front();
  const auto& [t0, v0] = h.front();
  if (t0 == q || cfg_.interpolation == Interpolation::HoldPrevious) return v0;
  const auto& [t1, v1] = h[1];
  return lerp_at(t0, v0, t1, v1, q);
}

double Monitor::window(const Block& b, State& s, double t, double lo, double hi, double x) const {
  const bool is_min = b.q == Quantifier::Forall;
  auto below_hi = [&](double w) { return b.hi_closed ? w <= hi : w < hi; };
  auto below_lo = [&](double w) { return b.lo_closed ? w < lo : w <= lo; };

  // Samples past a fixed upper bound, or already behind the lower bound, can never enter.
  const bool beyond = b.hi_fixed && !below_hi(t);
  if (!beyond && !below_lo(t)) s.history.emplace_back(t, x);
  while (!s.history.empty() && below_hi(s.history.front().first)) {
    auto [w, v] = s.history.front();
    s.history.pop_front();
    if (below_lo(w)) continue;
    if (std::isnan(v)) {
      throw Error(ErrorCode::UndefinedFormula,
                  "undefined value at t=" + format_number(w) + " in " + b.label);
    }
    while (!s.mono.empty() && (is_min ? s.mono.back().second >= v : s.mono.back().second <= v)) {
      s.mono.pop_back();
    }
    s.mono.emplace_back(w, v);
  }
  while (!s.mono.empty() && below_lo(s.mono.front().first)) s.mono.pop_front();
  return s.mono.empty() ? b.neutral() : s.mono.front().second;
}

void Monitor::evaluate(double t, std::span<const double> values) {
  for (const Block& b : graph_.blocks) {
    double& o = out_[b.id];
    const auto in = [&](std::size_t port) { return out_[b.inputs[port]]; };
    switch (b.kind) {
    case BlockKind::Input: o = values[input_slot_[b.id]]; break;
    case BlockKind::Clock: o = t; break;
    case BlockKind::Const: o = b.value; break;
    case BlockKind::AddSub: {
      double sum = 0.0;
      for (std::size_t i = 0; i < b.inputs.size(); ++i) sum += b.signs[i] * in(i);
      o = sum;
      break;
    }
    case BlockKind::TransportDelay: o = delay(state_[b.id], t, in(0), b.value); break;
    case BlockKind::UnaryFn: o = apply(b.unary_op, in(0)); break;
    case BlockKind::BinaryFn: o = apply(b.binary_op, in(0), in(1)); break;
    case BlockKind::Diff: {
      const double x = in(0);
      o = std::isnan(x) ? x : diff(b.rel, x, b.value, graph_.epsilon);
      break;
    }
    case BlockKind::IntervalGate: {
      const double clock = in(0);
      if (in_interval(clock, in(1), b.lo_closed, in(2), b.hi_closed)) {
        o = in(3);
        if (std::isnan(o)) {
          throw Error(ErrorCode::UndefinedFormula,
                      "undefined value at t=" + format_number(clock) + " in " + b.label);
        }
      } else {
        o = b.neutral();
      }
      break;
    }
    case BlockKind::RunningMin: {
      State& s = state_[b.id];
      s.reg = nan_min(s.reg, in(0));
      o = s.reg;
      break;
    }
    case BlockKind::RunningMax: {
      State& s = state_[b.id];
      s.reg = nan_max(s.reg, in(0));
      o = s.reg;
      break;
    }
    case BlockKind::SlidingWindow:
      o = window(b, state_[b.id], in(0), in(1), in(2), in(3));
      break;
    }
  }
}

Verdict Monitor::step(double t, std::span<const double> values) {
  if (verdict_.kind != Verdict::Kind::Running) return verdict_;
  if (steps_ > 0 && !(t > last_time_)) {
    throw Error(ErrorCode::NonMonotonicTime,
                "step time " + format_number(t) + " after " + format_number(last_time_));
  }
  if (!std::isfinite(t)) throw Error(ErrorCode::NonMonotonicTime, "step time is not finite");
  if (values.size() != graph_.inputs.size()) {
    throw Error(ErrorCode::MissingSignal, "expected " + std::to_string(graph_.inputs.size()) +
                                              " input values, got " + std::to_string(values.size()));
  }
  evaluate(t, values);
  last_time_ = t;
  ++steps_;
  const double e = out_[graph_.output];
  verdict_ = Verdict{Verdict::Kind::Running, t, e};
  if (cfg_.record_series) series_.push_back(SeriesPoint{t, e});
  if (cfg_.stop_enabled && t > horizon_ && e < cfg_.threshold) verdict_.kind = Verdict::Kind::Stopped;
  return verdict_;
}

Verdict Monitor::step(const StepInput& in) {
  std::vector<double> values;
  values.reserve(graph_.inputs.size());
  for (const auto& name : graph_.inputs) {
    auto it = in.values.find(name);
    if (it == in.values.end()) throw Error(ErrorCode::MissingSignal, "no value for signal " + name);
    values.push_back(it->second);
  }
  return step(in.t, values);
}

Verdict Monitor::finish() {
  if (verdict_.kind != Verdict::Kind::Running) return verdict_;
  if (steps_ == 0) throw Error(ErrorCode::DomainIncomplete, "no step was taken");
  const double end = cfg_.domain_end.value_or(graph_.required_end);
  if (last_time_ < end) {
    throw Error(ErrorCode::DomainIncomplete, "last step at " + format_number(last_time_) +
                                                 " but the domain ends at " + format_number(end));
  }
  verdict_.kind = Verdict::Kind::Finished;
  return verdict_;
}

namespace {

std::vector<std::size_t> input_columns(const BlockGraph& graph, const Trace& trace) {
  std::vector<std::size_t> cols;
  for (const auto& name : graph.inputs) {
    auto col = trace.signal_index(name);
    if (!col) throw Error(ErrorCode::MissingSignal, "trace has no signal " + name);
    cols.push_back(*col);
  }
  return cols;
}

RunResult run_one(const BlockGraph& graph, const Trace& trace, const MonitorConfig& cfg,
                  const std::atomic<bool>* cancel) {
  auto cols = input_columns(graph, trace);
  Monitor m(graph, cfg);
  std::vector<double> values(cols.size());
  auto times = trace.times();
  std::vector<std::span<const double>> columns;
  for (auto c : cols) columns.push_back(trace.values(c));
  RunResult r;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) values[k] = columns[k][i];
    Verdict v = m.step(times[i], values);
    if (v.kind == Verdict::Kind::Stopped) break;
    if (cancel && (i & 1023) == 0 && cancel->load(std::memory_order_relaxed)) {
      r.verdict = v;
      r.steps = m.steps();
      r.series = m.series();
      return r;
    }
  }
  r.verdict = m.finish();
  r.steps = m.steps();
  r.series = m.series();
  return r;
}

} // namespace

RunResult run_trace(const BlockGraph& graph, const Trace& trace, const MonitorConfig& cfg) {
  return run_one(graph, trace, cfg, nullptr);
}

BundleResult run_bundle(const BlockGraph& graph, std::span<const Trace> traces,
                        const MonitorConfig& cfg, unsigned workers) {
  if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "bundle needs at least one trace");
  for (const auto& tr : traces) {
    if (tr.domain_end() != traces.front().domain_end()) {
      throw Error(ErrorCode::InvalidArgument, "traces of one bundle must share the domain end");
    }
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<bool> cancel{false};
  std::atomic<std::size_t> next{0};
  BundleResult out;
  out.runs.resize(traces.size());
  std::vector<std::exception_ptr> errors(traces.size());

  auto worker = [&] {
    for (std::size_t i = next++; i < traces.size(); i = next++) {
      if (cancel.load()) continue;
      try {
        out.runs[i] = run_one(graph, traces[i], cfg, &cancel);
        if (out.runs[i].verdict.kind == Verdict::Kind::Stopped) cancel.store(true);
      } catch (...) {
        errors[i] = std::current_exception();
        cancel.store(true);
      }
    }
  };
  const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(traces.size()));
  std::vector<std::future<void>> pool;
  for (unsigned k = 1; k < n; ++k) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  bool stopped = false;
  for (const auto& r : out.runs) stopped = stopped || r.verdict.kind == Verdict::Kind::Stopped;
  out.kind = stopped ? Verdict::Kind::Stopped : Verdict::Kind::Finished;
  out.fitness = 1.0;
  for (const auto& r : out.runs) {
    if (!stopped || r.verdict.kind == Verdict::Kind::Stopped) out.fitness = std::min(out.fitness, r.verdict.e);
  }
  return out;
}

} // namespace rfol
