#include "rfol/compiler.hpp"
#include "rfol/error.hpp"

#include "random_cases.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <regex>
#include <sstream>

using namespace rfol;

namespace {

const std::set<std::string> kSignals{"f", "g", "s0", "s1", "s2"};

BlockGraph build(std::string_view text) { return compile(shift(parse_formula(text, kSignals)), kSignals); }

std::size_t count(const BlockGraph& g, BlockKind k) {
  return static_cast<std::size_t>(
      std::count_if(g.blocks.begin(), g.blocks.end(), [&](const Block& b) { return b.kind == k; }));
}

std::size_t ports(BlockKind k) {
  switch (k) {
  case BlockKind::Input:
  case BlockKind::Clock:
  case BlockKind::Const: return 0;
  case BlockKind::TransportDelay:
  case BlockKind::UnaryFn:
  case BlockKind::Diff:
  case BlockKind::RunningMin:
  case BlockKind::RunningMax: return 1;
  case BlockKind::BinaryFn: return 2;
  case BlockKind::IntervalGate:
  case BlockKind::SlidingWindow: return 4;
  case BlockKind::AddSub: return 0;
  }
  return 0;
}

void check_structure(const BlockGraph& g) {
  REQUIRE(g.output >= 0);
  REQUIRE(g.output < static_cast<int>(g.blocks.size()));
  std::vector<int> used(g.blocks.size(), 0);
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    const Block& b = g.blocks[i];
    CHECK(b.id == static_cast<int>(i));
    if (b.kind == BlockKind::AddSub) {
      CHECK(b.inputs.size() == b.signs.size());
      CHECK(!b.inputs.empty());
    } else {
      CHECK(b.inputs.size() == ports(b.kind));
    }
    for (int src : b.inputs) {
      CHECK(src >= 0);
      CHECK(src < b.id);
      used[src] = 1;
    }
    if (b.kind == BlockKind::TransportDelay) CHECK(b.value >= 0);
  }
  // Every block except the output feeds something: one connected graph, one output.
  for (std::size_t i = 0; i < g.blocks.size(); ++i) {
    if (static_cast<int>(i) != g.output) CHECK(used[i] == 1);
  }
  CHECK(used[g.output] == 0);
}

} // namespace

TEST_CASE("always-below requirement compiles to gate, diff and running minimum") {
  BlockGraph g = build("forall t in [0, 100]: f(t) < 1.5");
  check_structure(g);
  CHECK(count(g, BlockKind::Clock) == 1);
  CHECK(count(g, BlockKind::IntervalGate) == 1);
  CHECK(count(g, BlockKind::RunningMin) == 1);
  REQUIRE(count(g, BlockKind::Diff) == 1);
  auto diff = std::find_if(g.blocks.begin(), g.blocks.end(), [](const Block& b) { return b.kind == BlockKind::Diff; });
  CHECK(diff->rel == Rel::Lt);
  CHECK(diff->value == 1.5);
  CHECK(g.blocks[g.output].kind == BlockKind::RunningMin);
  CHECK(g.inputs == std::vector<std::string>{"f"});
}

TEST_CASE("constant index compiles to a degenerate gate") {
  BlockGraph g = build("f(3) < 1");
  check_structure(g);
  auto gate = std::find_if(g.blocks.begin(), g.blocks.end(),
                           [](const Block& b) { return b.kind == BlockKind::IntervalGate; });
  REQUIRE(gate != g.blocks.end());
  CHECK(g.blocks[gate->inputs[1]].kind == BlockKind::Const);
  CHECK(g.blocks[gate->inputs[1]].value == 3);
  CHECK(g.blocks[gate->inputs[2]].value == 3);
  CHECK(gate->lo_closed);
  CHECK(gate->hi_closed);
}

TEST_CASE("shifted forward reference uses one transport delay") {
  BlockGraph g = build("forall t in [0, 10): f(t) - f(t + 2) <= 0.1");
  check_structure(g);
  REQUIRE(count(g, BlockKind::TransportDelay) == 1);
  auto d = std::find_if(g.blocks.begin(), g.blocks.end(),
                        [](const Block& b) { return b.kind == BlockKind::TransportDelay; });
  CHECK(d->value == 2);
  CHECK(count(g, BlockKind::BinaryFn) == 1);
  CHECK(count(g, BlockKind::Input) == 1);
}

TEST_CASE("existential quantifiers use running maximum") {
  BlockGraph g = build("exists t in [0, 10]: f(t) > 0");
  check_structure(g);
  CHECK(count(g, BlockKind::RunningMax) == 1);
  CHECK(g.horizon_d == 10);
  auto gate = std::find_if(g.blocks.begin(), g.blocks.end(),
                           [](const Block& b) { return b.kind == BlockKind::IntervalGate; });
  CHECK(gate->neutral() == -1.0);
}

TEST_CASE("junctions become pointwise min and max") {
  BlockGraph g = build("forall t in [0, 10]: f(t) > 0 and g(t) > 0 or f(t) < 1");
  check_structure(g);
  std::size_t mins = 0, maxs = 0;
  for (const auto& b : g.blocks) {
    if (b.kind != BlockKind::BinaryFn) continue;
    mins += b.binary_op == BinaryOp::Min;
    maxs += b.binary_op == BinaryOp::Max;
  }
  CHECK(mins == 1);
  CHECK(maxs == 1);
}

TEST_CASE("graph text output is deterministic") {
  const char* text = "forall t in [0, 100]: f(t) < 1.5";
  const std::string a = export_dot(build(text));
  const std::string b = export_dot(build(text));
  CHECK(!a.empty());
  CHECK(a == b);
  BlockGraph g = build(text);
  const std::regex node(R"(^\s+b\d+ \[label=)");
  std::size_t nodes = 0;
  std::istringstream in(a);
  for (std::string line; std::getline(in, line);) nodes += std::regex_search(line, node);
  CHECK(nodes == g.blocks.size());
  CHECK(to_json(build(text)) == to_json(g));
}

TEST_CASE("block counts") {
  GraphStats s = graph_stats(build("forall t in [0, 1]: f(t) < 1"));
  CHECK(s.blocks == 7);
  CHECK(s.connections == 6);
  GraphStats a = graph_stats(build("forall t in [0, 100]: f(t) < 1.5"));
  GraphStats b = graph_stats(build("forall t in [0, 100]: f(t) < 1.5"));
  CHECK(a.blocks == b.blocks);
  CHECK(a.connections == b.connections);
}

TEST_CASE("block counts grow linearly with conjunction chains") {
  std::vector<std::size_t> blocks, conns;
  std::string body = "f(t) > 0";
  for (int n = 1; n <= 8; ++n) {
    GraphStats s = graph_stats(build("forall t in [0, 10]: " + body));
    blocks.push_back(s.blocks);
    conns.push_back(s.connections);
    body += " and f(t) > " + std::to_string(n);
  }
  for (std::size_t i = 2; i < blocks.size(); ++i) {
    CHECK(blocks[i] - blocks[i - 1] == blocks[1] - blocks[0]);
    CHECK(conns[i] - conns[i - 1] == conns[1] - conns[0]);
  }
}

TEST_CASE("json round trip") {
  testsupport::CaseGenerator gen(77);
  for (int i = 0; i < 100; ++i) {
    auto f = gen.formula({4, 3, 40.0});
    BlockGraph g = compile(shift(f), kSignals);
    BlockGraph back = graph_from_json(to_json(g));
    CHECK(to_json(back) == to_json(g));
    CHECK(export_dot(back) == export_dot(g));
  }
  CHECK(to_json(build("f(1) < 1")).find("\"schema_version\": 1") != std::string::npos);
  CHECK_THROWS_AS(graph_from_json("{}"), Error);
  CHECK_THROWS_AS(graph_from_json("not json"), Error);
}

TEST_CASE("compile rejects unshifted formulas and unknown signals") {
  ShiftReport bad;
  bad.original = bad.shifted = parse_formula("forall t in [0, 5]: f(t + 1) > 0", kSignals);
  try {
    compile(bad, kSignals);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotOnlineCheckable);
  }
  try {
    compile(shift(parse_formula("forall t in [0, 5]: g(t) > 0", kSignals)), std::set<std::string>{"f"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndeclaredSignal);
  }
}

TEST_CASE("random formulas compile to well-formed graphs") {
  testsupport::CaseGenerator gen(123);
  for (int i = 0; i < 300; ++i) {
    auto f = gen.formula({4, 3, 40.0});
    INFO(to_string(*f));
    check_structure(compile(shift(f), kSignals));
  }
}
