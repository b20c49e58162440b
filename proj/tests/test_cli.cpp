#include "rfol/stl.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "rfol_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + RFOL_CLI + "\" " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  Run r{0, {}};
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kSatex = std::string(RFOL_SOURCE_DIR) + "/specs/satex.spec";

const char* kSimple = "signal f;\ndomain 99;\nreq A: forall t in [0, 99]: f(t) < 5;\n";

} // namespace

TEST_CASE("validate exit codes") {
  Run ok = cli("validate " + kSatex);
  CHECK(ok.code == 0);
  CHECK_THAT(ok.out, Catch::Matchers::ContainsSubstring("R6: ok"));

  write("cond2.spec", "signal f;\ndomain 10;\nreq A: forall t in [0, 5]: forall u in [0, 5]: f(t) + f(u) < 4;\n");
  Run bad = cli("validate " + path("cond2.spec"));
  CHECK(bad.code == 1);
  CHECK_THAT(bad.out, Catch::Matchers::ContainsSubstring("f(t) + f(u) < 4"));
  CHECK_THAT(bad.out, Catch::Matchers::ContainsSubstring("cond2.spec:3:"));

  CHECK(cli("validate " + path("missing.spec")).code == 2);
  CHECK(cli("validate").code == 2);
}

TEST_CASE("shift prints the shifted requirement") {
  Run r = cli("shift " + kSatex + " --req R5");
  CHECK(r.code == 0);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("[2, 102)"));
}

TEST_CASE("monitor stops early on an injected failure") {
  write("simple.spec", kSimple);
  REQUIRE(cli("gen --signals f --steps 100 --dt 1 --profile sine --inject-failure-at 0.3 --failure-value 10 -o " +
               path("fail.csv")).code == 0);
  Run r = cli("monitor " + path("simple.spec") + " " + path("fail.csv") + " --json " + path("fail.json"));
  CHECK(r.code == 1);
  json doc = json::parse(slurp(path("fail.json")));
  CHECK(doc["schema_version"] == 1);
  const json& res = doc["results"][0];
  CHECK(res["verdict"] == "stopped");
  CHECK(res["stop_time"].get<double>() == 30.0);
  CHECK(res["steps_executed"].get<int>() == 31);

  Run full = cli("monitor " + path("simple.spec") + " " + path("fail.csv") + " --no-stop --series " +
                  path("series.csv"));
  CHECK(full.code == 1);
  std::istringstream series(slurp(path("series.csv")));
  std::string line;
  std::getline(series, line);
  CHECK(line == "requirement,trace,time,fitness");
  std::size_t rows = 0;
  while (std::getline(series, line)) ++rows;
  CHECK(rows == 100);
}

TEST_CASE("monitor over a bundle reports the minimum") {
  write("simple.spec", kSimple);
  std::vector<double> single;
  std::string files;
  for (int seed = 1; seed <= 3; ++seed) {
    const std::string name = "b" + std::to_string(seed) + ".csv";
    REQUIRE(cli("gen --signals f --steps 100 --dt 1 --profile noise --sigma " + std::to_string(seed) +
                 " --seed " + std::to_string(seed) + " -o " + path(name)).code == 0);
    cli("monitor " + path("simple.spec") + " " + path(name) + " --no-stop --json " + path("one.json"));
    single.push_back(json::parse(slurp(path("one.json")))["results"][0]["fitness"].get<double>());
    files += " " + path(name);
  }
  cli("monitor " + path("simple.spec") + files + " --no-stop --json " + path("bundle.json"));
  json doc = json::parse(slurp(path("bundle.json")));
  CHECK(doc["results"][0]["traces"].size() == 3);
  CHECK(doc["results"][0]["fitness"].get<double>() == *std::min_element(single.begin(), single.end()));
}

TEST_CASE("compare agrees on a generated trace") {
  REQUIRE(cli("gen --spec " + kSatex + " --steps 2200 --dt 1 --profile sine --seed 4 -o " + path("sat.csv")).code ==
          0);
  Run r = cli("compare " + kSatex + " " + path("sat.csv"));
  CHECK(r.code == 0);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("R6: offline"));
}

TEST_CASE("stl2rfol matches the library translation") {
  const std::vector<std::string> lines{"G[0,2] F[1,3] (x >= 0)", "(x >= 0) U[0,4] (y > 5)"};
  write("in.stl", "# comment\n" + lines[0] + "\n\n" + lines[1] + "\n");
  Run r = cli("stl2rfol " + path("in.stl"));
  CHECK(r.code == 0);
  std::string expected;
  for (const auto& l : lines) expected += rfol::to_string(*rfol::stl::to_rfol(rfol::stl::parse(l))) + "\n";
  CHECK(r.out == expected);
  write("bad.stl", "F[3,1] x > 0\n");
  CHECK(cli("stl2rfol " + path("bad.stl")).code == 1);
}

TEST_CASE("compile output is byte-identical across runs") {
  REQUIRE(cli("compile " + kSatex + " --req R6 --dot " + path("a.dot") + " --json " + path("a.json")).code == 0);
  REQUIRE(cli("compile " + kSatex + " --req R6 --dot " + path("b.dot") + " --json " + path("b.json")).code == 0);
  CHECK(slurp(path("a.dot")) == slurp(path("b.dot")));
  CHECK(slurp(path("a.json")) == slurp(path("b.json")));
  CHECK(slurp(path("a.dot")).rfind("digraph", 0) == 0);
  Run stats = cli("compile " + kSatex + " --req R1 --stats");
  CHECK_THAT(stats.out, Catch::Matchers::ContainsSubstring("R1: blocks"));

  REQUIRE(cli("compile " + kSatex + " --dot " + path("all.dot")).code == 0);
  CHECK(fs::exists(path("all.R1.dot")));
  CHECK(fs::exists(path("all.R6.dot")));
}

TEST_CASE("generated traces are reproducible") {
  cli("gen --signals a,b --steps 50 --profile noise --sigma 0.5 --seed 3 -o " + path("g1.csv"));
  cli("gen --signals a,b --steps 50 --profile noise --sigma 0.5 --seed 3 -o " + path("g2.csv"));
  CHECK(slurp(path("g1.csv")) == slurp(path("g2.csv")));
  CHECK(cli("gen --steps 5").code == 2);
}
