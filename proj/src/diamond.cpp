#include "flowsat/diamond.hpp"

#include "flowsat/error.hpp"

#include <memory>
#include <set>

namespace flowsat {

namespace {

// A straight line of unary stream operators ending at `hole`.
void check_half(const Term &t, Op hole, const char *which) {
  const Term *cur = &t;
  while (cur->op() != hole) {
    if (!is_unary_stream_op(cur->op()))
      throw ParseError(ParseErrorKind::hole_placement,
                       std::string("zipper ") + which + " half must be a chain of unary operators ending in '" +
                           std::string(op_name(hole)) + "', found " + print_term(*cur));
    cur = &cur->child(0);
  }
}

std::size_t count_holes(const Term &t, Op hole) { return count_op(t, hole); }

Term fill(const Term &t, Op hole, const Term &with) {
  return map_leaves(t, [&](const Term &leaf) { return leaf.op() == hole ? with : leaf; });
}

Term wrap(Op op, const std::string &symbol, Term child) { return Term::make(op, symbol, {std::move(child)}); }

// The pattern spelling of a unary operator around `inner`, e.g.
// "(map ?f in)" or "(persist in)".
std::string op_pattern(Op op, const std::string &inner) {
  std::string head(op_name(op));
  if (has_symbol(op)) return "(" + head + " ?f " + inner + ")";
  return "(" + head + " " + inner + ")";
}

struct TaggedRule {
  VarTable vars;
  Pattern lhs;
  std::optional<Pattern> rhs;
  Op op;
  int edge;
};

std::vector<Match> search_all(const std::vector<TaggedRule> &rules, const EGraph &graph) {
  std::vector<Match> out;
  for (std::size_t i = 0; i < rules.size(); ++i)
    for (auto &m : ematch(graph, rules[i].lhs, rules[i].vars)) {
      m.tag = static_cast<int>(i);
      out.push_back(std::move(m));
    }
  return out;
}

// Some finite term in the class, preferring the first node in canonical
// order; enough for merge bodies, which only diamond rewrites create.
std::optional<Term> representative(const EGraph &graph, Id id, std::set<Id> &visiting) {
  id = graph.find(id);
  if (visiting.count(id)) return std::nullopt;
  visiting.insert(id);
  std::optional<Term> result;
  for (const auto &node : graph.eclass(id).nodes) {
    std::vector<Term> children;
    bool ok = true;
    for (Id c : node.args()) {
      auto t = representative(graph, c, visiting);
      if (!t) {
        ok = false;
        break;
      }
      children.push_back(std::move(*t));
    }
    if (ok) {
      result = graph.node_term(node, std::move(children));
      break;
    }
  }
  visiting.erase(id);
  return result;
}

} // namespace

Zipper Zipper::from_term(const Term &t) {
  if (t.op() != Op::zipper) throw ParseError(ParseErrorKind::hole_placement, "expected a zipper, got " + print_term(t));
  Zipper z{t.child(0), t.child(1)};
  check_half(z.front, Op::hole_in, "front");
  check_half(z.back, Op::hole_out, "back");
  return z;
}

Term Zipper::to_term() const { return Term::binary(Op::zipper, front, back); }

Term Zipper::apply(const Term &input) const {
  Term value = fill(front, Op::hole_in, input);
  // The back half's outermost operator is applied first.
  for (const Term *cur = &back; cur->op() != Op::hole_out; cur = &cur->child(0))
    value = wrap(cur->op(), cur->symbol(), std::move(value));
  return value;
}

DiamondTerm DiamondTerm::from_term(const Term &t) {
  if (t.op() != Op::diamond)
    throw ParseError(ParseErrorKind::hole_placement, "expected a diamond, got " + print_term(t));
  DiamondTerm d{t.child(0), Zipper::from_term(t.child(1)), Zipper::from_term(t.child(2)), t.child(3)};
  if (count_holes(d.merge, Op::hole_first) == 0 || count_holes(d.merge, Op::hole_second) == 0)
    throw ParseError(ParseErrorKind::hole_placement, "diamond merge must use both 'first' and 'second'");
  if (count_holes(d.merge, Op::hole_in) || count_holes(d.merge, Op::hole_out))
    throw ParseError(ParseErrorKind::hole_placement, "diamond merge may not contain zipper holes");
  return d;
}

Term DiamondTerm::to_term() const {
  return Term::make(Op::diamond, {}, {shared, edge1.to_term(), edge2.to_term(), merge});
}

Term desugar(const DiamondTerm &d) {
  Term first = d.edge1.apply(d.shared);
  Term second = d.edge2.apply(d.shared);
  return map_leaves(d.merge, [&](const Term &leaf) {
    if (leaf.op() == Op::hole_first) return first;
    if (leaf.op() == Op::hole_second) return second;
    return leaf;
  });
}

Term desugar_all(const Term &t) {
  if (t.is_leaf()) return t;
  if (t.op() == Op::diamond) {
    auto d = DiamondTerm::from_term(t);
    d.shared = desugar_all(d.shared);
    d.merge = desugar_all(d.merge);
    return desugar(d);
  }
  if (t.op() == Op::zipper) return t;
  std::vector<Term> children;
  bool changed = false;
  for (const auto &c : t.children()) {
    children.push_back(desugar_all(c));
    changed = changed || children.back() != c;
  }
  return changed ? Term::make(t.op(), t.symbol(), std::move(children)) : t;
}

RuleSet shift_rules() {
  RuleSet set{"shift", {}};
  for (Op op : unary_stream_ops()) {
    auto name = "shift-" + std::string(op_name(op));
    auto front_outer = "(zipper " + op_pattern(op, "?x") + " ?y)";
    auto back_outer = "(zipper ?x " + op_pattern(op, "?y") + ")";
    for (auto &r : Rewrite::bidirectional(name, back_outer, front_outer)) {
      r.rate_group = "shift";
      r.in_zipper_halves = true;
      set.rules.push_back(std::move(r));
    }
  }
  return set;
}

Rewrite inline_rule() {
  auto rules = std::make_shared<std::vector<TaggedRule>>();
  for (int edge : {1, 2}) {
    for (Op op : unary_stream_ops()) {
      TaggedRule r{{}, Pattern{}, std::nullopt, op, edge};
      auto zipper = "(zipper ?front " + op_pattern(op, "out") + ")";
      auto text = edge == 1 ? "(diamond ?s " + zipper + " ?other ?m)" : "(diamond ?s ?other " + zipper + " ?m)";
      r.lhs = Pattern::parse(text, r.vars);
      rules->push_back(std::move(r));
    }
  }

  Rewrite rw;
  rw.name = "inline";
  rw.in_zipper_halves = true;
  rw.searcher = [rules](const EGraph &graph) { return search_all(*rules, graph); };
  rw.applier = [rules](EGraph &graph, const Match &m) -> std::vector<Id> {
    const auto &rule = (*rules)[m.tag];
    auto var = [&](const char *name) { return m.subst.classes[rule.vars.class_index(name)]; };
    std::set<Id> visiting;
    auto merge = representative(graph, var("?m"), visiting);
    if (!merge) return {};
    std::string symbol;
    if (has_symbol(rule.op)) symbol = graph.symbol_name(m.subst.symbols[rule.vars.symbol_index("?f")]);
    Op hole = rule.edge == 1 ? Op::hole_first : Op::hole_second;
    Term new_merge = fill(*merge, hole, wrap(rule.op, symbol, Term::hole(hole)));

    ENode zip;
    zip.op = Op::zipper;
    zip.arity = 2;
    zip.children = {var("?front"), graph.add_term(Term::hole(Op::hole_out))};
    Id edited = graph.add(zip);

    ENode d;
    d.op = Op::diamond;
    d.arity = 4;
    d.children = {var("?s"), rule.edge == 1 ? edited : var("?other"), rule.edge == 1 ? var("?other") : edited,
                  graph.add_term(new_merge)};
    return {graph.add(d)};
  };
  return rw;
}

Rewrite hoist_rule() {
  auto rules = std::make_shared<std::vector<TaggedRule>>();
  for (Op op : unary_stream_ops()) {
    TaggedRule r{{}, Pattern{}, std::nullopt, op, 0};
    auto front = op_pattern(op, "in");
    r.lhs = Pattern::parse("(diamond ?s (zipper " + front + " ?b1) (zipper " + front + " ?b2) ?m)", r.vars);
    r.rhs = Pattern::parse("(diamond " + op_pattern(op, "?s") + " (zipper in ?b1) (zipper in ?b2) ?m)", r.vars, false);
    rules->push_back(std::move(r));
  }

  Rewrite rw;
  rw.name = "hoist";
  rw.in_zipper_halves = true;
  rw.searcher = [rules](const EGraph &graph) { return search_all(*rules, graph); };
  rw.applier = [rules](EGraph &graph, const Match &m) -> std::vector<Id> {
    return {instantiate(graph, *(*rules)[m.tag].rhs, m.subst)};
  };
  return rw;
}

RuleSet diamond_rules() {
  RuleSet set{"diamond", {inline_rule(), hoist_rule()}};
  set += shift_rules();
  set.name = "diamond";
  return set;
}

} // namespace flowsat
