#include "random_cases.hpp"

#include "rfol/compiler.hpp"
#include "rfol/runtime.hpp"
#include "rfol/semantics.hpp"
#include "rfol/shifting.hpp"

#include <catch_amalgamated.hpp>

using namespace rfol;

TEST_CASE("online fitness matches offline evaluation on random formulas") {
  testsupport::CaseGenerator gen(20261016);
  const std::set<std::string> signals{"s0", "s1", "s2"};
  MonitorConfig cfg;
  cfg.stop_enabled = false;
  int mismatches = 0;
  for (int i = 0; i < 300; ++i) {
    const double step = gen.coin() ? 1.0 : 0.5;
    FormulaPtr f = gen.formula({4, 3, 40.0});
    Trace tr = gen.trace(40.0, step, 3);
    const double offline = eval(f, tr);
    ShiftReport rep = shift(f);
    BlockGraph g = compile(rep, signals);
    const double online = run_trace(g, tr, cfg).verdict.e;
    const double shifted_offline = eval(rep.shifted, tr);
    if (online != offline || shifted_offline != offline) {
      ++mismatches;
      if (mismatches <= 5) {
        UNSCOPED_INFO(to_string(*f) << "\n  shifted " << to_string(*rep.shifted) << "\n  offline "
                                    << offline << " shifted " << shifted_offline << " online "
                                    << online << " step " << step);
      }
    }
  }
  CHECK(mismatches == 0);
}
