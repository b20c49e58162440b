#pragma once

// Random formulas and traces for the property suites. Every constant is an
// integer and the grid step is 1 or 0.5, so all interval endpoints land on
// grid points.

#include "rfol/ast.hpp"
#include "rfol/stl.hpp"
#include "rfol/trace.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

struct FormulaLimits {
  int max_depth = 4;        // quantifier nesting
  int signals = 3;
  double domain_end = 40.0;
};

class CaseGenerator {
public:
  explicit CaseGenerator(std::uint64_t seed) : rng_(seed) {}

  /// Piecewise-linear signals over [0, b] on a uniform grid.
  rfol::Trace trace(double domain_end, double step, int signals);

  /// Closed, valid, well-defined formula for [0, domain_end] whose shifted
  /// form also stays inside the domain.
  rfol::FormulaPtr formula(const FormulaLimits& lim);

  rfol::stl::FormulaPtr stl(int depth, const std::vector<std::string>& signals);

  std::mt19937_64& rng() { return rng_; }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

private:
  rfol::FormulaPtr closed(int depth);
  rfol::FormulaPtr open(const std::string& var, int depth);
  rfol::FormulaPtr pred(const std::string& var);
  rfol::SignalTermPtr term(const std::string& var, int depth);
  std::string fresh() { return "v" + std::to_string(++counter_); }

  std::mt19937_64 rng_;
  FormulaLimits lim_;
  int counter_ = 0;
};

} // namespace testsupport
