#include "rfol/generate.hpp"

#include "rfol/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace rfol {

std::optional<Profile> profile_from_string(std::string_view name) {
  if (name == "ramp") return Profile::Ramp;
  if (name == "sine") return Profile::Sine;
  if (name == "step") return Profile::Step;
  if (name == "noise") return Profile::Noise;
  return std::nullopt;
}

std::size_t failure_row(const GenOptions& opts) {
  if (!opts.inject_failure_at) return opts.steps;
  const double at = std::ceil(*opts.inject_failure_at * static_cast<double>(opts.steps));
  return std::min(opts.steps, static_cast<std::size_t>(std::max(0.0, at)));
}

Trace generate_trace(const GenOptions& opts) {
  if (opts.steps < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 steps");
  if (!(opts.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (opts.sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
  if (opts.signals.empty()) throw Error(ErrorCode::InvalidArgument, "no signals to generate");
  if (opts.inject_failure_at && !(*opts.inject_failure_at >= 0.0 && *opts.inject_failure_at <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "failure fraction must lie in [0, 1]");
  }

  const std::size_t n = opts.steps;
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) * opts.dt;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t fail = failure_row(opts);
  const double last = static_cast<double>(n - 1);

  std::vector<std::pair<std::string, std::vector<double>>> columns;
  for (std::size_t k = 0; k < opts.signals.size(); ++k) {
    std::vector<double> v(n);
    const double phase = 0.25 * static_cast<double>(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / last;
      double x = 0.0;
      switch (opts.profile) {
      case Profile::Ramp: x = u; break;
      case Profile::Sine: x = 0.5 * std::sin(2.0 * std::numbers::pi * (4.0 * u + phase)); break;
      case Profile::Step: x = u < 0.5 ? 0.0 : 0.5; break;
      case Profile::Noise: x = 0.0; break;
      }
      if (opts.sigma > 0.0) x += opts.sigma * noise(rng);
      v[i] = i >= fail ? opts.failure_value : x;
    }
    columns.emplace_back(opts.signals[k], std::move(v));
  }
  return Trace(std::move(times), std::move(columns));
}

} // namespace rfol
