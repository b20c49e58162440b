#pragma once

#include "rfol/compiler.hpp"
#include "rfol/trace.hpp"

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rfol {

struct Verdict {
  enum class Kind { Running, Stopped, Finished };
  Kind kind = Kind::Running;
  double t = 0.0;  // time of the step that produced it
  double e = 1.0;  // fitness

  bool passed() const { return e >= 0.0; }
};

std::string_view to_string(Verdict::Kind kind);

struct MonitorConfig {
  /// Stop once the fitness drops below this after the horizon.
  double threshold = 0.0;
  bool stop_enabled = true;
  /// Defaults to the graph's horizon.
  std::optional<double> horizon;
  /// finish() requires the last step to reach this time; defaults to the
  /// largest index the formula reads.
  std::optional<double> domain_end;
  bool record_series = false;
  Interpolation interpolation = Interpolation::Linear;
  /// Output of a transport delay before its input has history.
  double delay_initial = 0.0;
};

struct SeriesPoint {
  double t;
  double e;
};

struct StepInput {
  double t;
  std::map<std::string, double> values;
};

class Monitor {
public:
  Monitor(const BlockGraph& graph, MonitorConfig cfg = {});

  /// `values` follows graph().inputs order.
  Verdict step(double t, std::span<const double> values);
  Verdict step(const StepInput& in);
  /// Final verdict; a stopped monitor keeps its Stopped verdict.
  Verdict finish();

  const BlockGraph& graph() const { return graph_; }
  const MonitorConfig& config() const { return cfg_; }
  double value() const { return verdict_.e; }
  std::size_t steps() const { return steps_; }
  const std::vector<SeriesPoint>& series() const { return series_; }

private:
  struct State {
    double reg = 0.0;
    std::deque<std::pair<double, double>> history;  // TransportDelay input; SlidingWindow pending samples
    std::deque<std::pair<double, double>> mono;     // SlidingWindow monotonic queue
  };

  void evaluate(double t, std::span<const double> values);
  double delay(State& s, double t, double in, double d) const;
  double window(const Block& b, State& s, double t, double lo, double hi, double x) const;

  const BlockGraph& graph_;
  MonitorConfig cfg_;
  double horizon_;
  std::vector<int> input_slot_;  // block id -> position in the values span
  std::vector<double> out_;
  std::vector<State> state_;
  std::vector<SeriesPoint> series_;
  Verdict verdict_;
  double last_time_ = 0.0;
  std::size_t steps_ = 0;
};

struct RunResult {
  Verdict verdict;
  std::size_t steps = 0;
  std::vector<SeriesPoint> series;
};

/// Feeds every grid point of the trace; stops early on a Stopped verdict.
RunResult run_trace(const BlockGraph& graph, const Trace& trace, const MonitorConfig& cfg = {});

struct BundleResult {
  /// Minimum final fitness over the traces (over the stopped ones after an early stop).
  double fitness = 1.0;
  Verdict::Kind kind = Verdict::Kind::Finished;
  std::vector<RunResult> runs;
};

/// One monitor per trace, run on up to `workers` threads (0: hardware concurrency).
/// With stopping enabled, the first stopped trace cancels the others.
BundleResult run_bundle(const BlockGraph& graph, std::span<const Trace> traces,
                        const MonitorConfig& cfg = {}, unsigned workers = 0);

} // namespace rfol
