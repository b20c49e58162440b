#pragma once

#include "rfol/ast.hpp"

#include <cmath>
#include <limits>

namespace rfol {

/// Predicate fitness. With mu = lhs - r the value is mu/(|mu|+1) up to sign,
/// which keeps it in [-1, 1]; strict relations and != yield -epsilon at mu = 0.
inline double diff(Rel rel, double lhs, double r, double epsilon) {
  const double mu = lhs - r;
  const double scaled = mu / (std::fabs(mu) + 1.0);
  switch (rel) {
  case Rel::Eq: return -std::fabs(mu) / (std::fabs(mu) + 1.0);
  case Rel::Ne: return mu != 0.0 ? std::fabs(mu) / (std::fabs(mu) + 1.0) : -epsilon;
  case Rel::Ge: return scaled;
  case Rel::Gt: return mu != 0.0 ? scaled : -epsilon;
  case Rel::Le: return -scaled;
  case Rel::Lt: return mu != 0.0 ? -scaled : -epsilon;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Undefined results (division by zero, sqrt of a negative, ...) come back as NaN.
inline double apply(UnaryOp op, double x) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  double out = nan;
  switch (op) {
  case UnaryOp::Neg: out = -x; break;
  case UnaryOp::Abs: out = std::fabs(x); break;
  case UnaryOp::Sin: out = std::sin(x); break;
  case UnaryOp::Cos: out = std::cos(x); break;
  case UnaryOp::Sqrt: out = x < 0.0 ? nan : std::sqrt(x); break;
  case UnaryOp::Exp: out = std::exp(x); break;
  }
  return std::isfinite(out) ? out : nan;
}

inline double apply(BinaryOp op, double a, double b) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (std::isnan(a) || std::isnan(b)) return nan;
  double out = nan;
  switch (op) {
  case BinaryOp::Add: out = a + b; break;
  case BinaryOp::Sub: out = a - b; break;
  case BinaryOp::Mul: out = a * b; break;
  case BinaryOp::Div: out = b == 0.0 ? nan : a / b; break;
  case BinaryOp::Min: out = a < b ? a : b; break;
  case BinaryOp::Max: out = a > b ? a : b; break;
  case BinaryOp::Pow: out = std::pow(a, b); break;
  }
  return std::isfinite(out) ? out : nan;
}

/// min/max that propagate NaN from either side.
inline double nan_min(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  return a < b ? a : b;
}

inline double nan_max(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  return a > b ? a : b;
}

/// Does `x` lie in the interval with the given numeric bounds and closedness?
inline bool in_interval(double x, double lo, bool lo_closed, double hi, bool hi_closed) {
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

} // namespace rfol
