#include "rfol/ast.hpp"
#include "rfol/error.hpp"
#include "rfol/parser.hpp"
#include "rfol/semantics.hpp"
#include "rfol/shifting.hpp"
#include "rfol/stl.hpp"

#include "random_cases.hpp"

#include <catch_amalgamated.hpp>

using namespace rfol;

namespace {

const std::vector<std::string> kNames{"x", "y"};
const std::set<std::string> kSignals{"x", "y"};

std::string rfol_text(std::string_view stl_text) { return to_string(*stl::to_rfol(stl::parse(stl_text))); }

bool temporal(stl::Op op) {
  return op == stl::Op::Finally || op == stl::Op::Globally || op == stl::Op::Until ||
         op == stl::Op::Release;
}

/// True when an Until or Release sits below another temporal operator.
bool nested_until(const stl::Formula& f, bool under_temporal) {
  if ((f.op == stl::Op::Until || f.op == stl::Op::Release) && under_temporal) return true;
  const bool below = under_temporal || temporal(f.op);
  return (f.lhs && nested_until(*f.lhs, below)) || (f.rhs && nested_until(*f.rhs, below));
}

Trace discrete(testsupport::CaseGenerator& gen, double end) {
  std::vector<double> times;
  for (double t = 0; t <= end; t += 1) times.push_back(t);
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  for (const auto& n : kNames) {
    std::vector<double> v(times.size());
    for (auto& x : v) x = gen.uniform(-4, 4) / 4.0;
    cols.emplace_back(n, std::move(v));
  }
  return Trace(std::move(times), std::move(cols));
}

} // namespace

TEST_CASE("negation normal form") {
  CHECK(stl::to_string(*stl::nnf(stl::parse("not (x < 3)"))) == "x >= 3");
  CHECK(stl::to_string(*stl::nnf(stl::parse("not (x <= 3)"))) == "x > 3");
  CHECK(stl::to_string(*stl::nnf(stl::parse("not G[0,2] (x < 1)"))) == "F[0, 2] x >= 1");
  CHECK(stl::to_string(*stl::nnf(stl::parse("not (x < 1 and F[0,1] y > 0)"))) == "x >= 1 or G[0, 1] y <= 0");
}

TEST_CASE("translation examples") {
  CHECK(rfol_text("F[1,3] (x >= 0)") == "exists t1 in [1, 3]: x(t1) >= 0");
  CHECK(rfol_text("G[0,2] F[1,3] (x >= 0)") ==
        "forall t1 in [0, 2]: exists t2 in [t1 + 1, t1 + 3]: x(t2) >= 0");
  CHECK(rfol_text("(x >= 0) U[0,4] (x >= 5)") ==
        "exists t1 in [0, 4]: x(t1) >= 5 and (forall t2 in [0, t1]: x(t2) >= 0)");
  CHECK(rfol_text("(x >= 0) R[0,4] (x >= 5)") ==
        "(exists t1 in [0, 4]: (x(t1) >= 5 and x(t1) >= 0) and (forall t2 in [0, t1]: x(t2) >= 5)) or "
        "(forall t3 in [0, 4]: x(t3) >= 5)");
  CHECK(rfol_text("x > 1 and y < 2") == "x(0) > 1 and y(0) < 2");
}

TEST_CASE("translations round-trip through the parser") {
  for (const char* s : {"F[1,3] (x >= 0)", "G[0,2] F[1,3] (x >= 0)", "(x >= 0) U[0,4] (x >= 5)"}) {
    auto f = stl::to_rfol(stl::parse(s));
    CHECK(equal(*parse_formula(to_string(*f), kSignals), *f));
  }
}

TEST_CASE("parser errors") {
  for (const char* bad : {"F[3,1] x > 0", "x == 1", "G[0,2]", "x > 0 and", "F[0,1 x > 0", "x = 1"}) {
    INFO(bad);
    CHECK_THROWS_AS(stl::parse(bad), Error);
  }
}

TEST_CASE("printing round-trips") {
  testsupport::CaseGenerator gen(8);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.stl(3, kNames);
    CHECK(stl::to_string(*stl::parse(stl::to_string(*f))) == stl::to_string(*f));
  }
}

TEST_CASE("boolean evaluation basics") {
  Trace tr(std::vector<double>{0, 1, 2, 3}, {{"x", {0, 0, 0, 0}}, {"y", {0, 0, 0, 0}}});
  CHECK(stl::holds(stl::parse("G[0,3] x < 1"), tr));
  CHECK_FALSE(stl::holds(stl::parse("F[0,3] x > 1"), tr));
  try {
    stl::holds(stl::parse("G[0,4] x < 1"), tr);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndefinedFormula);
  }
}

TEST_CASE("until needs the left side up to the witness") {
  Trace tr(std::vector<double>{0, 1, 2, 3, 4}, {{"x", {1, 1, 0, 5, 5}}, {"y", {0, 0, 0, 0, 0}}});
  CHECK_FALSE(stl::holds(stl::parse("(x >= 1) U[0,4] (x >= 5)"), tr));
  CHECK(stl::holds(stl::parse("(x >= 0) U[0,4] (x >= 5)"), tr));
  CHECK(stl::holds(stl::parse("(x >= 1) U[0,1] (x >= 1)"), tr));
}

TEST_CASE("translation agrees with direct evaluation") {
  testsupport::CaseGenerator gen(2026);
  int nested = 0;
  for (int i = 0; i < 300; ++i) {
    auto f = gen.stl(3, kNames);
    Trace tr = discrete(gen, stl::horizon(*f) + gen.uniform(1, 3));
    INFO(stl::to_string(*f));
    const bool direct = stl::holds(f, tr);
    CHECK(holds(stl::to_rfol(f), tr) == direct);
    CHECK(stl::holds(stl::nnf(f), tr) == direct);
    CHECK(stl::holds(stl::nnf(stl::lnot(f)), tr) == !direct);
    nested += nested_until(*f, false);
  }
  CHECK(nested > 0);
}

TEST_CASE("translations without nested until are valid and shiftable") {
  testsupport::CaseGenerator gen(31);
  for (int i = 0; i < 300; ++i) {
    auto f = gen.stl(3, kNames);
    auto r = stl::to_rfol(f);
    INFO(to_string(*r));
    if (nested_until(*stl::nnf(f), false)) {
      auto v = validate(r);
      REQUIRE(v);
      CHECK(v->kind == Violation::Kind::Condition2);
    } else {
      CHECK_FALSE(validate(r));
      CHECK_NOTHROW(shift(r));
    }
  }
}
