// flowsat: optimize, compare and inspect dataflow programs.
//
// Exit codes: 0 ok, 2 usage or parse error, 3 semantic divergence,
// 4 saturation limit reached under --strict.

#include "flowsat/error.hpp"
#include "flowsat/optimizer.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace flowsat;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_divergence = 3;
constexpr int exit_limit = 4;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ProgramFile load_program(const std::string &path) {
  try {
    return parse_program(read_file(path));
  } catch (const ParseError &e) {
    throw ParseError(e.kind(), path + ":" + e.what());
  }
}

struct SaturationFlags {
  std::string rules = "core";
  std::size_t max_iters = Limits{}.max_iters;
  std::size_t max_nodes = Limits{}.max_nodes;
  long max_millis = Limits{}.max_time.count();
  std::vector<std::string> weights;
  std::string weights_file;

  void attach(CLI::App &cmd) {
    cmd.add_option("--rules", rules, "Rule sets (core, join, unary, diamond, shift, all, none) or rule names, comma-separated")
        ->capture_default_str();
    cmd.add_option("--max-iters", max_iters, "Saturation iteration limit")->capture_default_str();
    cmd.add_option("--max-nodes", max_nodes, "Saturation e-node limit")->capture_default_str();
    cmd.add_option("--max-millis", max_millis, "Saturation time limit in milliseconds")->capture_default_str();
    cmd.add_option("--weight", weights, "Cost weight override op=n (repeatable)");
    cmd.add_option("--weights-file", weights_file, "File of `op = weight` lines");
  }

  void apply(OptimizeConfig &config) const {
    config.rules = rules;
    config.limits.max_iters = max_iters;
    config.limits.max_nodes = max_nodes;
    config.limits.max_time = std::chrono::milliseconds(max_millis);
    if (!weights_file.empty()) config.cost.load_config(read_file(weights_file));
    for (const auto &w : weights) {
      auto eq = w.find('=');
      if (eq == std::string::npos) throw Error("--weight expects op=n, got '" + w + "'");
      config.cost.load_config(w.substr(0, eq) + "=" + w.substr(eq + 1));
    }
  }
};

std::uint64_t default_seed() {
  if (const char *env = std::getenv("FLOWSAT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception &) {
      throw Error("FLOWSAT_SEED must be an unsigned integer");
    }
  }
  return 0;
}

void print_text_report(const OptimizeResult &r, std::ostream &out) {
  const auto &s = r.saturation;
  out << "cost before: " << r.cost_before << "\n";
  out << "cost after:  " << r.cost_after << "\n";
  out << "saturation:  " << stop_reason_name(s.stop) << " after " << s.iterations << " iteration(s), " << s.nodes
      << " e-nodes, " << s.classes << " e-classes, " << s.elapsed.count() << " ms\n";
  for (const auto &[rule, n] : s.applications)
    if (n) out << "  " << rule << ": " << n << "\n";
  if (!r.checks.empty()) {
    for (const auto &c : r.checks)
      out << "check seed " << c.seed << ": "
          << (c.result.equivalent ? std::string("ok") : "diverged, " + c.result.divergence->describe()) << "\n";
  }
}

int run_optimize(const std::string &path, const OptimizeConfig &config, bool strict, const std::string &format,
                 const std::string &output) {
  auto program = load_program(path);
  auto result = optimize_program(program, config);

  auto text = print_program(result.program);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) throw Error("cannot write '" + output + "'");
    out << text;
  }
  if (format == "lines")
    std::cerr << result.report_lines();
  else
    print_text_report(result, std::cerr);

  if (!result.checks_passed()) return exit_divergence;
  if (result.saturation.stop != StopReason::saturated) {
    std::cerr << "warning: saturation stopped at " << stop_reason_name(result.saturation.stop) << "\n";
    if (strict) return exit_limit;
  }
  return exit_ok;
}

int run_check(const std::string &path_a, const std::string &path_b, std::size_t traces, std::size_t ticks,
              std::uint64_t seed, const std::string &trace_file, const std::string &format) {
  auto a = load_program(path_a);
  auto b = load_program(path_b);
  auto names_a = a.sink_names();
  auto names_b = b.sink_names();
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b) {
    std::cerr << "error: programs have different sinks\n";
    return exit_usage;
  }

  std::vector<TraceCheck> checks;
  if (!trace_file.empty()) {
    auto trace = parse_trace(read_file(trace_file));
    checks.push_back({0, equivalent(a, b, trace, UdfRegistry::standard())});
  } else {
    checks = check_programs(a, b, traces, ticks, seed);
  }

  bool all = true;
  for (const auto &c : checks) {
    all = all && c.result.equivalent;
    if (format == "lines") {
      std::cout << "trace.seed" << c.seed << "=" << (c.result.equivalent ? "ok" : "diverged") << "\n";
      if (!c.result.equivalent) std::cout << "trace.seed" << c.seed << ".divergence=" << c.result.divergence->describe() << "\n";
    } else {
      std::cout << "trace seed " << c.seed << ": "
                << (c.result.equivalent ? std::string("ok") : "diverged at " + c.result.divergence->describe()) << "\n";
    }
  }
  if (format == "lines") std::cout << "equivalent=" << (all ? "true" : "false") << "\n";
  return all ? exit_ok : exit_divergence;
}

int run_dump(const std::string &path, const OptimizeConfig &config) {
  auto program = load_program(path);
  auto rules = rules_by_name(config.rules);
  EGraph graph;
  std::vector<std::pair<std::string, Id>> roots;
  for (const auto &[name, tree] : flatten(program)) roots.emplace_back(name, graph.add_term(tree));
  auto report = saturate(graph, rules.rules, config.limits);
  std::cout << graph.dump();
  for (const auto &[name, id] : roots) std::cout << "(root " << name << " " << graph.find(id) << ")\n";
  std::cout << report.to_lines();
  return exit_ok;
}

int run_interpret(const std::string &path, const std::string &trace_file) {
  auto program = load_program(path);
  auto trace = parse_trace(read_file(trace_file));
  std::cout << print_output(run(program, trace, UdfRegistry::standard()));
  return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Equality-saturation optimizer for stateful dataflow programs"};
  app.require_subcommand(1);

  std::string format = "text";
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto *optimize = app.add_subcommand("optimize", "Optimize a program file");
  std::string opt_path, opt_output;
  SaturationFlags opt_flags;
  std::size_t cse_min = 2, check_n = 0, opt_ticks = 8;
  bool strict = false;
  optimize->add_option("program", opt_path, "Program file")->required();
  opt_flags.attach(*optimize);
  optimize->add_option("--cse-min-size", cse_min, "Smallest shared subtree re-formed into a def")->capture_default_str();
  optimize->add_option("--check", check_n, "Verify on N random traces")->capture_default_str();
  optimize->add_option("--ticks", opt_ticks, "Ticks per check trace")->capture_default_str();
  optimize->add_option("--seed", seed, "Seed for check traces (default $FLOWSAT_SEED or 0)")
      ->each([&](const std::string &) { seed_given = true; });
  optimize->add_flag("--strict", strict, "Fail when a saturation limit is reached");
  optimize->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "lines"}));
  optimize->add_option("-o,--output", opt_output, "Write the optimized program here instead of stdout");

  auto *check = app.add_subcommand("check", "Compare two programs on random traces");
  std::string check_a, check_b, check_trace;
  std::size_t check_traces = 10, check_ticks = 8;
  check->add_option("first", check_a, "Program file")->required();
  check->add_option("second", check_b, "Program file")->required();
  check->add_option("--traces,--check", check_traces, "Number of random traces")->capture_default_str();
  check->add_option("--ticks", check_ticks, "Ticks per trace")->capture_default_str();
  check->add_option("--seed", seed, "Seed of the first trace (default $FLOWSAT_SEED or 0)")
      ->each([&](const std::string &) { seed_given = true; });
  check->add_option("--trace", check_trace, "Use this trace file instead of random traces");
  check->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "lines"}));

  auto *dump = app.add_subcommand("dump", "Saturate and print the e-graph");
  std::string dump_path;
  SaturationFlags dump_flags;
  dump->add_option("program", dump_path, "Program file")->required();
  dump_flags.attach(*dump);

  auto *interpret = app.add_subcommand("run", "Run a program on a trace file and print sink outputs");
  std::string run_path, run_trace;
  interpret->add_option("program", run_path, "Program file")->required();
  interpret->add_option("--trace", run_trace, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (!seed_given) seed = default_seed();
    if (optimize->parsed()) {
      OptimizeConfig config;
      opt_flags.apply(config);
      config.cse_min_size = cse_min;
      config.check_traces = check_n;
      config.check_ticks = opt_ticks;
      config.seed = seed;
      return run_optimize(opt_path, config, strict, format, opt_output);
    }
    if (check->parsed()) return run_check(check_a, check_b, check_traces, check_ticks, seed, check_trace, format);
    if (dump->parsed()) {
      OptimizeConfig config;
      dump_flags.apply(config);
      config.validate();
      return run_dump(dump_path, config);
    }
    if (interpret->parsed()) return run_interpret(run_path, run_trace);
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_usage;
  } catch (const EvalError &e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
