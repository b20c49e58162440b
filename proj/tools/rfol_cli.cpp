#include "rfol/compiler.hpp"
#include "rfol/error.hpp"
#include "rfol/generate.hpp"
#include "rfol/parser.hpp"
#include "rfol/runtime.hpp"
#include "rfol/semantics.hpp"
#include "rfol/shifting.hpp"
#include "rfol/stl.hpp"
#include "rfol/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace rfol;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kSchemaVersion = 1;

int exit_code_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::Io:
  case ErrorCode::TraceFormat:
  case ErrorCode::MissingSignal:
  case ErrorCode::InvalidArgument:
  case ErrorCode::DomainIncomplete:
  case ErrorCode::NonMonotonicTime: return kExitUsage;
  default: return kExitViolation;
  }
}

void report(const std::string& source, const Error& e) {
  std::cerr << source;
  if (e.pos()) std::cerr << ':' << e.pos()->line << ':' << e.pos()->column;
  std::cerr << ": " << to_string(e.code()) << ": " << e.what() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

/// Requirements selected by --req (all when empty).
std::vector<Requirement> select(const Spec& spec, const std::vector<std::string>& names) {
  if (names.empty()) return spec.requirements;
  std::vector<Requirement> out;
  for (const auto& n : names) {
    auto it = std::find_if(spec.requirements.begin(), spec.requirements.end(),
                           [&](const Requirement& r) { return r.name == n; });
    if (it == spec.requirements.end()) throw Error(ErrorCode::InvalidArgument, "no requirement " + n);
    out.push_back(*it);
  }
  return out;
}

CompileOptions compile_options() { return CompileOptions{eval_config_from_env().epsilon}; }

std::string number(double v) { return format_number(v); }

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::string& path) {
  Spec spec = parse_spec_file(path);
  for (const auto& r : spec.requirements) {
    DomainCheck dc = well_defined(r.formula, spec.time_domain_end);
    std::cout << r.name << ": ok, size " << formula_size(*r.formula) << ", domain [0, "
              << number(dc.required_end) << "]";
    if (!dc.ok) std::cout << " exceeds domain " << number(spec.time_domain_end);
    std::cout << '\n';
  }
  return kExitOk;
}

// --- shift ------------------------------------------------------------------

int cmd_shift(const std::string& path, const std::vector<std::string>& reqs) {
  Spec spec = parse_spec_file(path);
  for (const auto& r : select(spec, reqs)) {
    ShiftReport rep = shift(r.formula);
    std::cout << r.name << '\n'
              << "  original:     " << to_string(*rep.original) << '\n'
              << "  shifted:      " << to_string(*rep.shifted) << '\n';
    for (const auto& s : rep.shifts) {
      std::cout << "  " << (s.q == Quantifier::Forall ? "forall " : "exists ") << s.var
                << ": d_t=" << number(s.d_t) << " d_u=" << number(s.d_u) << '\n';
    }
    std::cout << "  horizon:      " << number(rep.horizon_d) << '\n'
              << "  required end: " << number(rep.required_end) << '\n'
              << "  online:       " << (is_online_checkable(rep.shifted) ? "yes" : "no") << '\n';
  }
  return kExitOk;
}

// --- compile ----------------------------------------------------------------

std::string artifact_path(const std::string& path, const std::string& req, bool several) {
  if (!several) return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "." + req;
  return path.substr(0, dot) + "." + req + path.substr(dot);
}

int cmd_compile(const std::string& path, const std::vector<std::string>& reqs,
                const std::string& dot, const std::string& json_out, bool stats) {
  Spec spec = parse_spec_file(path);
  auto selected = select(spec, reqs);
  const bool several = selected.size() > 1;
  for (const auto& r : selected) {
    BlockGraph g = compile(shift(r.formula), spec, compile_options());
    if (!dot.empty()) open_out(artifact_path(dot, r.name, several)) << export_dot(g);
    if (!json_out.empty()) open_out(artifact_path(json_out, r.name, several)) << to_json(g) << '\n';
    if (stats || (dot.empty() && json_out.empty())) {
      GraphStats st = graph_stats(g);
      std::cout << r.name << ": blocks " << st.blocks << ", connections " << st.connections
                << ", horizon " << number(g.horizon_d) << '\n';
    }
  }
  return kExitOk;
}

// --- monitor ----------------------------------------------------------------

struct MonitorArgs {
  std::string spec;
  std::vector<std::string> traces;
  std::vector<std::string> reqs;
  double threshold = 0.0;
  bool no_stop = false;
  std::string series;
  std::string json_out;
  unsigned workers = 0;
  bool timing = false;
};

int cmd_monitor(const MonitorArgs& a) {
  Spec spec = parse_spec_file(a.spec);
  std::vector<Trace> traces;
  for (const auto& p : a.traces) traces.push_back(read_trace_csv_file(p));

  MonitorConfig cfg;
  cfg.threshold = a.threshold;
  cfg.stop_enabled = !a.no_stop;
  cfg.record_series = !a.series.empty();
  cfg.interpolation = eval_config_from_env().interpolation;

  json records = json::array();
  std::ostringstream series;
  series << "requirement,trace,time,fitness\n";
  bool all_pass = true;
  for (const auto& r : select(spec, a.reqs)) {
    BlockGraph g = compile(shift(r.formula), spec, compile_options());
    const auto start = std::chrono::steady_clock::now();
    BundleResult res = run_bundle(g, traces, cfg, a.workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::size_t steps = 0;
    std::optional<double> stop_time;
    for (const auto& run : res.runs) {
      steps += run.steps;
      if (run.verdict.kind == Verdict::Kind::Stopped &&
          (!stop_time || run.verdict.t < *stop_time)) {
        stop_time = run.verdict.t;
      }
    }
    all_pass = all_pass && res.fitness >= 0.0;

    std::cout << r.name << ": " << to_string(res.kind) << ", fitness " << number(res.fitness);
    if (stop_time) std::cout << ", stopped at t=" << number(*stop_time);
    std::cout << ", steps " << steps;
    if (a.timing) std::cout << ", wall " << number(wall) << " s";
    std::cout << '\n';

    json rec;
    rec["requirement"] = r.name;
    rec["verdict"] = std::string(to_string(res.kind));
    rec["fitness"] = number_json(res.fitness);
    rec["stop_time"] = stop_time ? json(*stop_time) : json(nullptr);
    rec["steps_executed"] = steps;
    if (a.timing) rec["wall_time_s"] = wall;
    json per = json::array();
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
      const auto& run = res.runs[i];
      per.push_back({{"trace", a.traces[i]},
                     {"verdict", std::string(to_string(run.verdict.kind))},
                     {"fitness", number_json(run.verdict.e)},
                     {"steps_executed", run.steps}});
      for (const auto& p : run.series) {
        series << r.name << ',' << i << ',' << number(p.t) << ',' << number(p.e) << '\n';
      }
    }
    rec["traces"] = per;
    records.push_back(rec);
  }
  if (!a.series.empty()) open_out(a.series) << series.str();
  if (!a.json_out.empty()) {
    json doc{{"schema_version", kSchemaVersion}, {"spec", a.spec}, {"results", records}};
    open_out(a.json_out) << doc.dump(2) << '\n';
  }
  return all_pass ? kExitOk : kExitViolation;
}

// --- compare ----------------------------------------------------------------

int cmd_compare(const std::string& path, const std::string& trace_path,
                const std::vector<std::string>& reqs) {
  Spec spec = parse_spec_file(path);
  Trace trace = read_trace_csv_file(trace_path);
  const EvalConfig ecfg = eval_config_from_env();
  MonitorConfig cfg;
  cfg.stop_enabled = false;
  cfg.interpolation = ecfg.interpolation;
  bool agree = true;
  for (const auto& r : select(spec, reqs)) {
    const double offline = eval(r.formula, trace, ecfg);
    BlockGraph g = compile(shift(r.formula), spec, compile_options());
    const double online = run_trace(g, trace, cfg).verdict.e;
    const double delta = std::fabs(online - offline);
    agree = agree && delta <= 1e-9;
    std::cout << r.name << ": offline " << number(offline) << ", online " << number(online)
              << ", difference " << number(delta) << '\n';
  }
  return agree ? kExitOk : kExitViolation;
}

// --- stl2rfol ---------------------------------------------------------------

int cmd_stl2rfol(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::cout << to_string(*stl::to_rfol(stl::parse(line))) << '\n';
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return kExitOk;
}

// --- gen --------------------------------------------------------------------

struct GenArgs {
  std::string signals;
  std::string spec;
  std::size_t steps = 100;
  double dt = 1.0;
  std::string profile = "ramp";
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::optional<double> inject;
  double failure_value = 100.0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  GenOptions o;
  if (!a.spec.empty()) {
    Spec spec = parse_spec_file(a.spec);
    for (const auto& s : spec.decls.scalar_signals()) o.signals.push_back(s);
  } else {
    std::stringstream ss(a.signals);
    for (std::string s; std::getline(ss, s, ',');) {
      if (!s.empty()) o.signals.push_back(s);
    }
  }
  if (o.signals.empty()) throw Error(ErrorCode::InvalidArgument, "no signals given");
  auto profile = profile_from_string(a.profile);
  if (!profile) throw Error(ErrorCode::InvalidArgument, "unknown profile " + a.profile);
  o.profile = *profile;
  o.steps = a.steps;
  o.dt = a.dt;
  o.sigma = a.sigma;
  o.seed = a.seed;
  o.inject_failure_at = a.inject;
  o.failure_value = a.failure_value;
  Trace t = generate_trace(o);
  if (a.out.empty()) {
    write_trace_csv(std::cout, t);
  } else {
    auto f = open_out(a.out);
    write_trace_csv(f, t);
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"RFOL requirement checking: validate, shift, compile and monitor"};
  app.require_subcommand(1);
  int code = kExitOk;
  std::string source;

  std::string spec_path, trace_path, stl_path, dot, json_out;
  std::vector<std::string> reqs;
  bool stats = false;

  auto* validate = app.add_subcommand("validate", "parse and check a spec file");
  validate->add_option("spec", spec_path, "spec file")->required();

  auto* shift_cmd = app.add_subcommand("shift", "print the shifted form of each requirement");
  shift_cmd->add_option("spec", spec_path, "spec file")->required();
  shift_cmd->add_option("--req", reqs, "requirement names (default: all)");

  auto* compile_cmd = app.add_subcommand("compile", "build the block network of each requirement");
  compile_cmd->add_option("spec", spec_path, "spec file")->required();
  compile_cmd->add_option("--req", reqs, "requirement names (default: all)");
  compile_cmd->add_option("--dot", dot, "write Graphviz output");
  compile_cmd->add_option("--json", json_out, "write the graph as JSON");
  compile_cmd->add_flag("--stats", stats, "print block and connection counts");

  MonitorArgs margs;
  auto* monitor = app.add_subcommand("monitor", "run the online monitor over traces");
  monitor->add_option("spec", margs.spec, "spec file")->required();
  monitor->add_option("traces", margs.traces, "trace CSV files; several form a bundle")->required();
  monitor->add_option("--req", margs.reqs, "requirement names (default: all)");
  monitor->add_option("--threshold", margs.threshold, "stop once fitness drops below this")
      ->check(CLI::Range(-1.0, 1.0));
  monitor->add_flag("--no-stop", margs.no_stop, "run every trace to the end");
  monitor->add_option("--series", margs.series, "write the fitness series as CSV");
  monitor->add_option("--json", margs.json_out, "write result records as JSON");
  monitor->add_option("--workers", margs.workers, "bundle worker threads (0: all cores)");
  monitor->add_flag("--timing", margs.timing, "report wall time");

  auto* compare = app.add_subcommand("compare", "check online against offline fitness");
  compare->add_option("spec", spec_path, "spec file")->required();
  compare->add_option("trace", trace_path, "trace CSV file")->required();
  compare->add_option("--req", reqs, "requirement names (default: all)");

  auto* stl2rfol = app.add_subcommand("stl2rfol", "translate STL formulas, one per line");
  stl2rfol->add_option("file", stl_path, "STL file")->required();

  GenArgs gargs;
  auto* gen = app.add_subcommand("gen", "write a synthetic trace CSV");
  auto* sig_opt = gen->add_option("--signals", gargs.signals, "comma separated signal names");
  gen->add_option("--spec", gargs.spec, "take the signals declared in a spec")->excludes(sig_opt);
  gen->add_option("--steps", gargs.steps, "number of rows")->check(CLI::PositiveNumber);
  gen->add_option("--dt", gargs.dt, "time step")->check(CLI::PositiveNumber);
  gen->add_option("--profile", gargs.profile, "ramp, sine, step or noise")
      ->check(CLI::IsMember({"ramp", "sine", "step", "noise"}));
  gen->add_option("--sigma", gargs.sigma, "standard deviation of added noise")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gargs.seed, "random seed");
  gen->add_option("--inject-failure-at", gargs.inject, "fraction of the trace where values jump")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--failure-value", gargs.failure_value, "value after the failure point");
  gen->add_option("-o,--out", gargs.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) {
      source = spec_path;
      code = cmd_validate(spec_path);
    } else if (shift_cmd->parsed()) {
      source = spec_path;
      code = cmd_shift(spec_path, reqs);
    } else if (compile_cmd->parsed()) {
      source = spec_path;
      code = cmd_compile(spec_path, reqs, dot, json_out, stats);
    } else if (monitor->parsed()) {
      source = margs.spec;
      code = cmd_monitor(margs);
    } else if (compare->parsed()) {
      source = spec_path;
      code = cmd_compare(spec_path, trace_path, reqs);
    } else if (stl2rfol->parsed()) {
      source = stl_path;
      code = cmd_stl2rfol(stl_path);
    } else if (gen->parsed()) {
      source = "gen";
      code = cmd_gen(gargs);
    }
  } catch (const Error& e) {
    report(source, e);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << source << ": " << e.what() << '\n';
    return kExitUsage;
  }
  return code;
}
