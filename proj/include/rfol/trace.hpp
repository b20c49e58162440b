#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rfol {

enum class Interpolation { Linear, HoldPrevious };

/// Named signals sampled on one shared, strictly increasing time grid that
/// starts at 0 and ends at the domain end b.
class Trace {
public:
  Trace() = default;

  /// Validates the grid and values; throws Error(TraceFormat) on violation.
  Trace(std::vector<double> times, std::vector<std::pair<std::string, std::vector<double>>> columns);

  /// Builds a trace from independently sampled signals by interpolating every
  /// signal onto the union of all timestamps.
  static Trace resample(const std::map<std::string, std::vector<std::pair<double, double>>>& signals,
                        Interpolation interpolation = Interpolation::Linear);

  double domain_end() const { return times_.empty() ? 0.0 : times_.back(); }
  std::size_t size() const { return times_.size(); }
  std::span<const double> times() const { return times_; }

  const std::vector<std::string>& signal_names() const { return names_; }
  std::optional<std::size_t> signal_index(std::string_view name) const;
  bool has_signal(std::string_view name) const { return signal_index(name).has_value(); }
  std::span<const double> values(std::size_t column) const { return columns_[column]; }

  /// Signal value at time t; exact on grid points, interpolated in between.
  /// Throws Error(UndefinedSignalValue) outside [0, b] or for an unknown signal.
  double sample(std::string_view signal, double t, Interpolation interpolation) const;
  double sample(std::size_t column, double t, Interpolation interpolation) const;

private:
  std::vector<double> times_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

/// CSV with header `time,<sig1>,...`. Empty cells are filled by linear
/// interpolation between the neighbouring samples of the same column.
Trace read_trace_csv(std::istream& in, const std::string& source_name = "<stream>");
Trace read_trace_csv_file(const std::string& path);
void write_trace_csv(std::ostream& out, const Trace& trace);

/// Linear interpolation helper shared by the evaluator and the delay buffers.
inline double lerp_at(double t0, double v0, double t1, double v1, double t) {
  if (t == t1) return v1;
  return v0 + (v1 - v0) * ((t - t0) / (t1 - t0));
}

} // namespace rfol
