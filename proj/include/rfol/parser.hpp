#pragma once

#include "rfol/ast.hpp"
#include "rfol/error.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rfol {

/// `signal name "unit";` declares a scalar; `signal name[k] "unit";` declares a
/// vector whose scalar components are `name_1` .. `name_k`.
struct SignalDecl {
  std::string name;
  std::string unit;
  std::vector<std::string> components;

  bool is_vector() const { return !components.empty(); }
};

struct Declarations {
  std::vector<SignalDecl> signals;
  std::map<std::string, double> constants;

  /// Names usable as f(t): every scalar signal and every vector component.
  std::set<std::string> scalar_signals() const;
  const SignalDecl* find(std::string_view name) const;
};

struct Requirement {
  std::string name;
  FormulaPtr formula;
  SourcePos pos;
};

struct Spec {
  Declarations decls;
  double time_domain_end = 0.0;
  std::vector<Requirement> requirements;
};

/// Parses a spec file. Every requirement is alpha-normalized and validated.
Spec parse_spec(std::string_view text);
Spec parse_spec_file(const std::string& path);

/// Parses one formula against the given declarations (alpha-normalized, validated).
FormulaPtr parse_formula(std::string_view text, const Declarations& decls);

/// Convenience overload: every name in `signals` is a declared scalar signal.
FormulaPtr parse_formula(std::string_view text, const std::set<std::string>& signals);

/// Same as parse_formula but skips the well-formedness check, for tooling that
/// wants to report violations itself.
FormulaPtr parse_formula_unchecked(std::string_view text, const Declarations& decls);

} // namespace rfol
