#include "flowsat/optimizer.hpp"

#include "flowsat/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace flowsat {

namespace {

std::string format_cost(double c) {
  std::ostringstream out;
  out << c;
  return out.str();
}

bool uses_join(const ProgramFile &program) {
  auto check = [](const Definition &d) { return contains_op(d.body, Op::join); };
  return std::any_of(program.defs.begin(), program.defs.end(), check) ||
         std::any_of(program.sinks.begin(), program.sinks.end(), check);
}

} // namespace

void OptimizeConfig::validate() const {
  if (limits.max_iters == 0 || limits.max_nodes == 0 || limits.max_time.count() <= 0)
    throw Error("saturation limits must be positive");
  if (cse_min_size == 0) throw Error("cse min size must be positive");
  if (check_ticks == 0) throw Error("check ticks must be positive");
}

bool OptimizeResult::checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const TraceCheck &c) { return c.result.equivalent; });
}

std::string OptimizeResult::report_lines() const {
  std::string out;
  out += "cost_before=" + format_cost(cost_before) + "\n";
  out += "cost_after=" + format_cost(cost_after) + "\n";
  out += saturation.to_lines();
  if (!checks.empty()) {
    std::size_t passed = 0;
    for (const auto &c : checks) passed += c.result.equivalent ? 1 : 0;
    out += "check.traces=" + std::to_string(checks.size()) + "\n";
    out += "check.passed=" + std::to_string(passed) + "\n";
    for (const auto &c : checks)
      if (!c.result.equivalent)
        out += "check.divergence.seed" + std::to_string(c.seed) + "=" + c.result.divergence->describe() + "\n";
  }
  return out;
}

ValueShape trace_shape(const ProgramFile &program) {
  return uses_join(program) ? ValueShape::keyed : ValueShape::integers;
}

OptimizeResult optimize_program(const ProgramFile &program, const OptimizeConfig &config, const UdfRegistry &udfs) {
  config.validate();
  auto rules = rules_by_name(config.rules);

  OptimizeResult result;
  result.input_trees = flatten(program);

  EGraph graph;
  std::map<std::string, Id> roots;
  for (const auto &[name, tree] : result.input_trees) {
    roots[name] = graph.add_term(tree);
    result.cost_before += term_cost(tree, config.cost);
  }
  result.saturation = saturate(graph, rules.rules, config.limits);

  Extractor extractor(graph, config.cost);
  for (const auto &[name, id] : roots) {
    auto best = extractor.best(id);
    result.cost_after += extractor.cost(id);
    result.output_trees.emplace(name, std::move(best));
  }
  result.program = reform_cse(result.output_trees, config.cse_min_size);
  std::set<std::string> def_names;
  for (const auto &d : result.program.defs) def_names.insert(d.name);
  for (const auto &s : program.sources)
    if (!def_names.count(s)) result.program.sources.push_back(s);

  if (config.check_traces > 0)
    result.checks = check_programs(program, result.program, config.check_traces, config.check_ticks, config.seed,
                                   config.batch_max, udfs);
  return result;
}

Term optimize_term(const Term &term, const OptimizeConfig &config, SaturationReport *report) {
  config.validate();
  auto rules = rules_by_name(config.rules);
  EGraph graph;
  Id root = graph.add_term(term);
  auto r = saturate(graph, rules.rules, config.limits);
  if (report) *report = r;
  return extract_best(graph, root, config.cost);
}

std::vector<TraceCheck> check_programs(const ProgramFile &a, const ProgramFile &b, std::size_t traces,
                                       std::size_t ticks, std::uint64_t seed, std::size_t batch_max,
                                       const UdfRegistry &udfs) {
  std::set<std::string> sources;
  for (const auto &s : a.external_sources()) sources.insert(s);
  for (const auto &s : b.external_sources()) sources.insert(s);
  std::vector<std::string> names(sources.begin(), sources.end());
  auto shape = uses_join(a) || uses_join(b) ? ValueShape::keyed : ValueShape::integers;

  std::vector<TraceCheck> out;
  for (std::size_t i = 0; i < traces; ++i) {
    auto trace_seed = seed + i;
    auto trace = random_trace(names, ticks, trace_seed, batch_max, shape);
    out.push_back({trace_seed, equivalent(a, b, trace, udfs, CompareMode::multiset)});
  }
  return out;
}

} // namespace flowsat
