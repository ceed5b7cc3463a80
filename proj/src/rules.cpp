#include "flowsat/rules.hpp"

#include "flowsat/diamond.hpp"
#include "flowsat/error.hpp"

#include <set>

namespace flowsat {

namespace {

void append(std::vector<Rewrite> &into, std::vector<Rewrite> rules) {
  for (auto &r : rules) into.push_back(std::move(r));
}

// `?a => (delta (persist ?a))`: the left side is a bare variable, so it
// matches every class.
Rewrite persist_delta_intro() {
  Rewrite r;
  r.name = "R1-rev";
  r.vars.classes = {"?a"};
  r.rhs = Pattern::parse("(delta (persist ?a))", r.vars, false);
  r.searcher = [](const EGraph &graph) {
    std::vector<Match> matches;
    for (Id id : graph.class_ids()) matches.push_back({id, Subst{{id}, {}}, 0});
    return matches;
  };
  return r;
}

} // namespace

RuleSet &RuleSet::operator+=(const RuleSet &other) {
  std::set<std::string> names;
  for (const auto &r : rules) names.insert(r.name);
  for (const auto &r : other.rules) {
    if (!names.insert(r.name).second) continue;
    rules.push_back(r);
  }
  name = name.empty() ? other.name : name + "+" + other.name;
  return *this;
}

const Rewrite *RuleSet::find(std::string_view rule) const {
  for (const auto &r : rules)
    if (r.name == rule) return &r;
  return nullptr;
}

Rewrite incrementalize_rule() {
  auto r = Rewrite::directed("R8", "(chain (prev ?a) ?b)", "(persist ?b)");
  int a = r.vars.class_index("?a");
  r.condition = [a](const EGraph &graph, const Match &m) {
    return graph.find(m.eclass) == graph.find(m.subst.classes[a]);
  };
  return r;
}

RuleSet core_rules() {
  RuleSet set{"core", {}};
  auto &rules = set.rules;
  rules.push_back(Rewrite::directed("R1-fwd", "(delta (persist ?a))", "?a"));
  append(rules, Rewrite::bidirectional("R2", "(persist ?a)", "(chain (old ?a) ?a)"));
  append(rules, Rewrite::bidirectional("R3", "(cross (chain ?a ?b) ?c)", "(chain (cross ?a ?c) (cross ?b ?c))"));
  append(rules, Rewrite::bidirectional("R4", "(cross ?a (chain ?b ?c))", "(chain (cross ?a ?b) (cross ?a ?c))"));
  append(rules, Rewrite::bidirectional("R5", "(chain (chain ?a ?b) ?c)", "(chain ?a (chain ?b ?c))"));
  append(rules, Rewrite::bidirectional("R6", "(old ?a)", "(prev (persist ?a))"));
  append(rules, Rewrite::bidirectional("R7", "(cross (prev ?a) (prev ?b))", "(prev (cross ?a ?b))"));
  rules.push_back(incrementalize_rule());
  rules.push_back(persist_delta_intro());
  return set;
}

RuleSet join_rules() {
  RuleSet set{"join", {}};
  auto &rules = set.rules;
  append(rules, Rewrite::bidirectional("R3j", "(join (chain ?a ?b) ?c)", "(chain (join ?a ?c) (join ?b ?c))"));
  append(rules, Rewrite::bidirectional("R4j", "(join ?a (chain ?b ?c))", "(chain (join ?a ?b) (join ?a ?c))"));
  append(rules, Rewrite::bidirectional("R7j", "(join (prev ?a) (prev ?b))", "(prev (join ?a ?b))"));
  return set;
}

RuleSet unary_rules() {
  RuleSet set{"unary", {}};
  auto &rules = set.rules;
  for (std::string op : {"map", "filter"}) {
    append(rules, Rewrite::bidirectional(op + "-chain", "(" + op + " ?f (chain ?a ?b))",
                                         "(chain (" + op + " ?f ?a) (" + op + " ?f ?b))"));
    append(rules, Rewrite::bidirectional(op + "-prev", "(" + op + " ?f (prev ?a))", "(prev (" + op + " ?f ?a))"));
  }
  return set;
}

namespace {

RuleSet all_rules() {
  RuleSet set = core_rules();
  set += join_rules();
  set += unary_rules();
  set += diamond_rules();
  set.name = "all";
  return set;
}

// A single rule ("R1-fwd") or both directions of one ("R1").
RuleSet single_rule(std::string_view name) {
  RuleSet set{std::string(name), {}};
  for (const auto &r : all_rules().rules)
    if (r.name == name || r.name == std::string(name) + "-fwd" || r.name == std::string(name) + "-rev")
      set.rules.push_back(r);
  return set;
}

} // namespace

RuleSet rules_by_name(std::string_view names) {
  RuleSet set;
  if (names.empty() || names == "none") return set;
  std::size_t start = 0;
  while (start <= names.size()) {
    auto end = names.find(',', start);
    if (end == std::string_view::npos) end = names.size();
    auto name = names.substr(start, end - start);
    if (name == "core")
      set += core_rules();
    else if (name == "join")
      set += join_rules();
    else if (name == "unary")
      set += unary_rules();
    else if (name == "diamond")
      set += diamond_rules();
    else if (name == "shift")
      set += shift_rules();
    else if (name == "all")
      set += all_rules();
    else if (auto one = single_rule(name); !one.rules.empty())
      set += one;
    else
      throw Error("unknown rule or rule set '" + std::string(name) + "'");
    start = end + 1;
  }
  return set;
}

} // namespace flowsat
