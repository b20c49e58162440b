#include "rfol/ast.hpp"
#include "rfol/error.hpp"
#include "rfol/parser.hpp"

#include "random_cases.hpp"

#include <catch_amalgamated.hpp>

using namespace rfol;

namespace {

Declarations fg() {
  Declarations d;
  d.signals = {{"f", "", {}}, {"g", "", {}}};
  return d;
}

FormulaPtr raw(std::string_view text) { return parse_formula_unchecked(text, fg()); }

FormulaPtr body_of(const FormulaPtr& f) { return std::get<Quantified>(f->node).body; }

} // namespace

TEST_CASE("free time variables") {
  CHECK(free_time_vars(*raw("forall t in [0, 1]: f(t) < 1")).empty());
  CHECK(free_time_vars(*raw("f(t) < 1")) == std::set<std::string>{"t"});

  auto nested = raw("forall t in [1, 5]: forall u in [7, 9]: f(t) + f(u) < 4");
  CHECK(free_time_vars(*nested).empty());
  auto pred = body_of(body_of(nested));
  CHECK(free_time_vars(*pred) == std::set<std::string>{"t", "u"});
}

TEST_CASE("free variables include interval bounds") {
  auto f = raw("exists u in [t - 1, t]: f(u) > 0");
  CHECK(free_time_vars(*f) == std::set<std::string>{"t"});
}

TEST_CASE("validate reports the violated condition and sub-formula") {
  auto two = raw("forall t in [1, 5]: forall u in [7, 9]: f(t) + f(u) < 4");
  auto v = validate(two);
  REQUIRE(v);
  CHECK(v->kind == Violation::Kind::Condition2);
  CHECK(to_string(*v->offending) == "f(t) + f(u) < 4");
  CHECK_THROWS_MATCHES(require_valid(two), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == ErrorCode::Condition2Violation; }));

  auto open = raw("f(t) < 1");
  auto v1 = validate(open);
  REQUIRE(v1);
  CHECK(v1->kind == Violation::Kind::Condition1);

  CHECK_FALSE(validate(raw("forall t in [2000, 86400): f(t) - g(t) <= 2")));
  CHECK_FALSE(validate(raw("f(3) < 1")));
}

TEST_CASE("formula size counts quantifiers, junctions, predicates and arithmetic") {
  CHECK(formula_size(*raw("f(3) < 1")) == 1);
  CHECK(formula_size(*raw("forall t in [0, 1]: f(t) < 1")) == 2);
  CHECK(formula_size(*raw("forall t in [0, 1]: f(t) + g(t) < 1 and f(t) > 0")) == 5);
}

TEST_CASE("quantifier depth") {
  CHECK(quantifier_depth(*raw("f(3) < 1")) == 0);
  CHECK(quantifier_depth(*raw("forall t in [0, 4]: exists u in [t, t + 1]: f(u) > 0")) == 2);
}

TEST_CASE("alpha normalization gives every binder a distinct name") {
  auto f = alpha_normalize(
      raw("(forall t in [0, 1]: f(t) < 1) and (forall t in [0, 2]: exists t in [t, t + 1]: g(t) > 0)"));
  CHECK(to_string(*f) ==
        "(forall t in [0, 1]: f(t) < 1) and (forall t_1 in [0, 2]: exists t_2 in [t_1, t_1 + 1]: g(t_2) > 0)");
  CHECK_FALSE(validate(f));
}

TEST_CASE("validate is stable under renaming") {
  testsupport::CaseGenerator gen(11);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.formula({3, 2, 30.0});
    CHECK_FALSE(validate(f));
    CHECK_FALSE(validate(alpha_normalize(f)));
  }
  auto bad = raw("forall t in [1, 5]: forall u in [7, 9]: f(t) + f(u) < 4");
  CHECK(validate(alpha_normalize(bad)));
}

TEST_CASE("negation flips relations and swaps duals") {
  auto f = raw("forall t in [0, 1]: f(t) < 1 and g(t) = 0");
  CHECK(to_string(*negate(f)) == "exists t in [0, 1]: f(t) >= 1 or g(t) != 0");
  CHECK(equal(*negate(negate(f)), *f));
}

TEST_CASE("time term constructors") {
  CHECK(TimeTerm::offset("t", 2).kind == TimeTerm::Kind::Plus);
  CHECK(TimeTerm::offset("t", -2).kind == TimeTerm::Kind::Minus);
  CHECK(TimeTerm::offset("t", 0).kind == TimeTerm::Kind::Var);
  CHECK(TimeTerm::offset("t", -2).signed_offset() == -2.0);
  CHECK(TimeTerm::offset("t", 3).instantiate(4.0) == 7.0);
  CHECK(TimeTerm::constant(5).instantiate(100.0) == 5.0);
}
