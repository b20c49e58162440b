#pragma once

#include "rfol/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rfol {

enum class Profile { Ramp, Sine, Step, Noise };

std::optional<Profile> profile_from_string(std::string_view name);

struct GenOptions {
  std::vector<std::string> signals;
  std::size_t steps = 100;  // number of rows, first at t = 0
  double dt = 1.0;
  Profile profile = Profile::Ramp;
  double sigma = 0.0;       // Gaussian noise added to every sample
  std::uint64_t seed = 1;
  /// From this fraction of the rows onward every signal holds `failure_value`.
  std::optional<double> inject_failure_at;
  double failure_value = 100.0;
};

/// Ramp rises from 0 to 1, Sine has amplitude 0.5 and period of a quarter of
/// the trace, Step jumps from 0 to 0.5 halfway, Noise is zero plus noise.
/// Signal k is offset in phase so that the columns differ.
Trace generate_trace(const GenOptions& opts);

/// First row index affected by failure injection.
std::size_t failure_row(const GenOptions& opts);

} // namespace rfol
