#include "flowsat/saturate.hpp"

#include "flowsat/error.hpp"

#include <set>
#include <unordered_set>

namespace flowsat {

namespace {

// Classes holding a zipper half or a whole zipper: everything above an
// `in`/`out` hole up to and including the nearest zipper node.
std::unordered_set<Id> zipper_classes(const EGraph &graph) {
  std::unordered_set<Id> found;
  std::vector<Id> work;
  for (Op hole : {Op::hole_in, Op::hole_out})
    if (auto id = graph.lookup_term(Term::hole(hole))) work.push_back(graph.find(*id));
  for (Id id : work) found.insert(id);
  while (!work.empty()) {
    Id id = work.back();
    work.pop_back();
    for (const auto &[node, parent] : graph.eclass(id).parents) {
      Id p = graph.find(parent);
      if (!found.insert(p).second) continue;
      if (node.op != Op::zipper) work.push_back(p);
    }
  }
  return found;
}

bool touches(const std::unordered_set<Id> &classes, const EGraph &graph, const Match &m) {
  if (classes.count(graph.find(m.eclass))) return true;
  for (Id id : m.subst.classes)
    if (id != Subst::unbound && classes.count(graph.find(id))) return true;
  return false;
}

} // namespace

std::vector<Match> Rewrite::search(const EGraph &graph) const {
  if (searcher) return searcher(graph);
  if (!lhs) return {};
  return ematch(graph, *lhs, vars);
}

std::vector<Id> Rewrite::apply(EGraph &graph, const Match &match) const {
  if (applier) return applier(graph, match);
  if (!rhs) return {};
  return {instantiate(graph, *rhs, match.subst)};
}

Rewrite Rewrite::directed(std::string name, std::string_view lhs, std::string_view rhs) {
  Rewrite r;
  r.name = std::move(name);
  r.lhs = Pattern::parse(lhs, r.vars, true);
  r.rhs = Pattern::parse(rhs, r.vars, false);
  if (r.lhs->root().is_var) throw Error("rewrite " + r.name + ": left-hand side must not be a bare variable");
  return r;
}

std::vector<Rewrite> Rewrite::bidirectional(const std::string &name, std::string_view a, std::string_view b) {
  return {directed(name + "-fwd", a, b), directed(name + "-rev", b, a)};
}

std::string Rewrite::describe() const {
  std::string out = name + ": ";
  out += lhs ? lhs->print(vars) : std::string("<search>");
  out += " => ";
  out += rhs && !applier ? rhs->print(vars) : std::string("<apply>");
  if (condition) out += " if <condition>";
  return out;
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
  case StopReason::saturated:
    return "saturated";
  case StopReason::iteration_limit:
    return "iteration-limit";
  case StopReason::node_limit:
    return "node-limit";
  case StopReason::time_limit:
    return "time-limit";
  }
  return "unknown";
}

std::size_t SaturationReport::applications_of(const std::string &rule) const {
  auto it = applications.find(rule);
  return it == applications.end() ? 0 : it->second;
}

std::string SaturationReport::to_lines() const {
  std::string out;
  out += "iterations=" + std::to_string(iterations) + "\n";
  out += "enodes=" + std::to_string(nodes) + "\n";
  out += "eclasses=" + std::to_string(classes) + "\n";
  out += "stop=" + std::string(stop_reason_name(stop)) + "\n";
  out += "elapsed_ms=" + std::to_string(elapsed.count()) + "\n";
  for (const auto &[rule, n] : applications) out += "applied." + rule + "=" + std::to_string(n) + "\n";
  return out;
}

SaturationReport saturate(EGraph &graph, std::span<const Rewrite> rules, const Limits &limits,
                          const ApplyHook &on_apply) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start); };

  SaturationReport report;
  for (const auto &r : rules) report.applications[r.name] = 0;
  graph.rebuild();

  std::optional<StopReason> stop;
  while (!stop) {
    if (report.iterations >= limits.max_iters) {
      stop = StopReason::iteration_limit;
      break;
    }
    ++report.iterations;
    auto version_before = graph.version();

    // Search against the clean graph; conditions see canonical ids.
    std::vector<std::vector<Match>> found(rules.size());
    auto zippers = zipper_classes(graph);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      auto matches = rules[i].search(graph);
      if (!rules[i].in_zipper_halves && !zippers.empty())
        std::erase_if(matches, [&](const Match &m) { return touches(zippers, graph, m); });
      if (rules[i].condition)
        std::erase_if(matches, [&](const Match &m) { return !rules[i].condition(graph, m); });
      found[i] = std::move(matches);
      if (elapsed() > limits.max_time) {
        stop = StopReason::time_limit;
        break;
      }
    }

    std::set<std::pair<std::string, Id>> limited;
    for (std::size_t i = 0; i < rules.size() && !stop; ++i) {
      const auto &rule = rules[i];
      for (const auto &m : found[i]) {
        if (!rule.rate_group.empty() && limited.count({rule.rate_group, graph.find(m.eclass)})) continue;
        auto before = graph.version();
        for (Id id : rule.apply(graph, m)) graph.merge(m.eclass, id);
        if (graph.version() == before) continue;
        ++report.applications[rule.name];
        if (!rule.rate_group.empty()) limited.insert({rule.rate_group, graph.find(m.eclass)});
        if (on_apply) on_apply(rule, m);
        if (graph.node_count() > limits.max_nodes) {
          stop = StopReason::node_limit;
          break;
        }
      }
      if (!stop && elapsed() > limits.max_time) stop = StopReason::time_limit;
    }

    graph.rebuild();
    report.nodes_per_iteration.push_back(graph.node_count());
    if (stop) break;
    if (graph.version() == version_before) stop = StopReason::saturated;
    else if (graph.node_count() > limits.max_nodes) stop = StopReason::node_limit;
  }

  report.stop = *stop;
  report.nodes = graph.node_count();
  report.classes = graph.class_count();
  report.elapsed = elapsed();
  return report;
}

} // namespace flowsat
