#include "rfol/error.hpp"
#include "rfol/parser.hpp"

#include "random_cases.hpp"

#include <catch_amalgamated.hpp>

#include <functional>

using namespace rfol;

namespace {

const std::set<std::string> kSignals{"f", "g", "sm", "s0", "s1", "s2"};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

SourcePos pos_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    REQUIRE(e.pos());
    return *e.pos();
  }
  FAIL("no error thrown");
  return {};
}

const Quantified& quant(const FormulaPtr& f) { return std::get<Quantified>(f->node); }

} // namespace

TEST_CASE("spec with one requirement") {
  Spec s = parse_spec("signal w; domain 86400; req R1: forall t in [0, 86400): w(t) < 1.5");
  CHECK(s.time_domain_end == 86400.0);
  REQUIRE(s.requirements.size() == 1);
  CHECK(s.requirements[0].name == "R1");
  CHECK(to_string(*s.requirements[0].formula) == "forall t in [0, 86400): w(t) < 1.5");
}

TEST_CASE("spec errors") {
  CHECK(code_of([] { parse_spec("signal f; domain 10; req bad: f(t) < 1"); }) ==
        ErrorCode::Condition1Violation);
  CHECK(code_of([] {
          parse_spec("signal f; domain 10; req bad: forall t in [1, 5]: forall u in [7, 9]: f(t) + f(u) < 4");
        }) == ErrorCode::Condition2Violation);
  CHECK(code_of([] { parse_spec("domain 10; req r: forall t in [0, 1]: h(t) < 1"); }) ==
        ErrorCode::UndeclaredSignal);
  CHECK(code_of([] { parse_spec("signal f; req r: forall t in [0, 1]: f(t) < 1"); }) ==
        ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_spec("signal f; domain 1; domain 2;"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] {
          parse_spec("signal f; domain 9; req a: f(1) < 1; req a: f(2) < 1");
        }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_spec_file("/nonexistent/file.spec"); }) == ErrorCode::Io);
}

TEST_CASE("empty requirement list") {
  Spec s = parse_spec("signal f; domain 5;");
  CHECK(s.requirements.empty());
}

TEST_CASE("parse errors carry line and column") {
  auto p = pos_of([] { parse_spec("signal f;\ndomain 10;\nreq r: forall t in [0, 1]: f(t) <> 1"); });
  CHECK(p.line == 3);
  CHECK(p.column == 34);
  auto q = pos_of([] { parse_spec("signal f;\ndomain 10;\nreq r: forall t in [0, 1]: h(t) < 1"); });
  CHECK(q.line == 3);
  CHECK(q.column == 28);
}

TEST_CASE("interval closedness and relations") {
  auto e = parse_formula("exists t in (0, 5]: g(t) >= 0", kSignals);
  const auto& q = quant(e);
  CHECK(q.q == Quantifier::Exists);
  CHECK_FALSE(q.iv.lower_closed);
  CHECK(q.iv.upper_closed);

  auto s = parse_formula("forall t in [0,1): sin(f(t)) != 0.5", kSignals);
  const auto& pred = std::get<Predicate>(quant(s).body->node);
  CHECK(pred.rel == Rel::Ne);
  CHECK(std::get<UnaryTerm>(pred.term->node).op == UnaryOp::Sin);

  for (const char* iv : {"[0, 1]", "[0, 1)", "(0, 1]", "(0, 1)"}) {
    for (const char* rel : {"<", "<=", ">", ">=", "=", "!="}) {
      const std::string text = std::string("forall t in ") + iv + ": f(t) " + rel + " 1";
      CHECK(to_string(*parse_formula(text, kSignals)) == text);
    }
  }
}

TEST_CASE("nested quantifier with variable bounds") {
  auto f = parse_formula("forall t in [0,86400): (forall t1 in (t, t+1]: sm(t1) = 1)", kSignals);
  const auto& inner = quant(quant(f).body);
  CHECK(inner.iv.lower == TimeTerm::variable("t"));
  CHECK(inner.iv.upper == TimeTerm::offset("t", 1));
  CHECK_FALSE(inner.iv.lower_closed);
}

TEST_CASE("unicode connectives") {
  auto a = parse_formula("∀ t ∈ [0, 2]: f(t) ≤ 1 ∧ g(t) ≥ 0", kSignals);
  auto b = parse_formula("forall t in [0, 2]: f(t) <= 1 and g(t) >= 0", kSignals);
  CHECK(equal(*a, *b));
}

TEST_CASE("implication negates the antecedent") {
  auto f = parse_formula(
      "forall t in [0, 10): (sm(t) = 0 and (forall t1 in (t, t + 1]: sm(t1) = 1)) -> f(t + 5) <= 0.02",
      kSignals);
  CHECK(to_string(*f) ==
        "forall t in [0, 10): (sm(t) != 0 or (exists t1 in (t, t + 1]: sm(t1) != 1)) or f(t + 5) <= 0.02");
}

TEST_CASE("norms expand over vector components") {
  Spec s = parse_spec("signal v[2]; domain 4; req n: forall t in [0, 4]: ||v(t)|| < 1.5");
  CHECK(to_string(*s.requirements[0].formula) ==
        "forall t in [0, 4]: sqrt((v_1(t) * v_1(t)) + (v_2(t) * v_2(t))) < 1.5");
}

TEST_CASE("named constants") {
  Spec s = parse_spec("signal f; domain 4; const lim = 2 * 0.5 + 1; req c: f(1) <= lim");
  CHECK(to_string(*s.requirements[0].formula) == "f(1) <= 2");
}

TEST_CASE("bound variables are renamed apart") {
  auto f = parse_formula("(forall t in [0, 1]: f(t) < 1) and (forall t in [0, 1]: g(t) < 1)", kSignals);
  const auto& j = std::get<Junction>(f->node);
  CHECK(quant(j.lhs).var != quant(j.rhs).var);
}

TEST_CASE("printing round-trips through the parser") {
  testsupport::CaseGenerator gen(99);
  for (int i = 0; i < 300; ++i) {
    auto f = gen.formula({4, 3, 40.0});
    auto again = parse_formula(to_string(*f), kSignals);
    REQUIRE(equal(*f, *again));
  }
}
