#include "flowsat/pattern.hpp"

#include "flowsat/error.hpp"

#include <algorithm>

namespace flowsat {

namespace {

bool is_variable(std::string_view atom) { return atom.size() > 1 && atom.front() == '?'; }

int intern_var(std::vector<std::string> &names, std::string_view name, bool allow_new, const SExpr &at) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<int>(it - names.begin());
  if (!allow_new)
    throw ParseError(ParseErrorKind::undefined_reference,
                     "variable '" + std::string(name) + "' is not bound by the left-hand side", at.line,
                     at.column);
  names.emplace_back(name);
  return static_cast<int>(names.size() - 1);
}

PatternNode build(const SExpr &form, VarTable &vars, bool allow_new) {
  PatternNode node;
  if (form.is_atom()) {
    if (is_variable(form.atom)) {
      node.is_var = true;
      node.var = intern_var(vars.classes, form.atom, allow_new, form);
      return node;
    }
    // Constant leaves reuse the term parser's rules.
    auto leaf = term_from_sexpr(form);
    node.op = leaf.op();
    node.symbol = leaf.symbol();
    return node;
  }
  if (form.items.empty() || form.items.front().is_list)
    throw ParseError(ParseErrorKind::syntax, "expected an operator", form.line, form.column);
  auto op = operator_keyword(form.items.front().atom);
  if (!op)
    throw ParseError(ParseErrorKind::unknown_operator, "unknown operator '" + form.items.front().atom + "'",
                     form.line, form.column);
  node.op = *op;
  std::size_t first = 1;
  if (has_symbol(*op)) {
    if (form.items.size() < 2 || form.items[1].is_list)
      throw ParseError(ParseErrorKind::arity, "missing function name", form.line, form.column);
    const auto &sym = form.items[1];
    if (is_variable(sym.atom))
      node.symbol_var = intern_var(vars.symbols, sym.atom, allow_new, sym);
    else
      node.symbol = sym.atom;
    first = 2;
  }
  if (static_cast<int>(form.items.size() - first) != arity(*op))
    throw ParseError(ParseErrorKind::arity, "wrong number of inputs for " + form.items.front().atom, form.line,
                     form.column);
  for (std::size_t i = first; i < form.items.size(); ++i) node.children.push_back(build(form.items[i], vars, allow_new));
  return node;
}

void print_node(const PatternNode &n, const VarTable &vars, std::string &out) {
  if (n.is_var) {
    out += vars.classes[n.var];
    return;
  }
  if (n.op == Op::source) {
    out += n.symbol;
    return;
  }
  if (is_hole(n.op)) {
    out += op_name(n.op);
    return;
  }
  out += '(';
  out += op_name(n.op);
  if (has_symbol(n.op)) out += ' ' + (n.symbol_var >= 0 ? vars.symbols[n.symbol_var] : n.symbol);
  for (const auto &c : n.children) {
    out += ' ';
    print_node(c, vars, out);
  }
  out += ')';
}

void match_node(const EGraph &graph, const PatternNode &p, Id cls, const Subst &subst, std::vector<Subst> &out) {
  cls = graph.find(cls);
  if (p.is_var) {
    Id bound = subst.classes[p.var];
    if (bound == Subst::unbound) {
      auto next = subst;
      next.classes[p.var] = cls;
      out.push_back(std::move(next));
    } else if (graph.find(bound) == cls) {
      out.push_back(subst);
    }
    return;
  }

  SymbolId constant = no_symbol;
  if (has_symbol(p.op) && p.symbol_var < 0) {
    auto sym = graph.find_symbol(p.symbol);
    if (!sym) return;
    constant = *sym;
  }

  for (const auto &node : graph.eclass(cls).nodes) {
    if (node.op != p.op) continue;
    Subst base = subst;
    if (has_symbol(p.op)) {
      if (p.symbol_var >= 0) {
        auto &slot = base.symbols[p.symbol_var];
        if (slot == no_symbol)
          slot = node.symbol;
        else if (slot != node.symbol)
          continue;
      } else if (node.symbol != constant) {
        continue;
      }
    }
    std::vector<Subst> partial{std::move(base)};
    for (std::size_t i = 0; i < p.children.size() && !partial.empty(); ++i) {
      std::vector<Subst> next;
      for (const auto &s : partial) match_node(graph, p.children[i], node.children[i], s, next);
      partial = std::move(next);
    }
    out.insert(out.end(), std::make_move_iterator(partial.begin()), std::make_move_iterator(partial.end()));
  }
}

} // namespace

int VarTable::class_index(std::string_view name) const {
  auto it = std::find(classes.begin(), classes.end(), name);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

int VarTable::symbol_index(std::string_view name) const {
  auto it = std::find(symbols.begin(), symbols.end(), name);
  return it == symbols.end() ? -1 : static_cast<int>(it - symbols.begin());
}

Pattern Pattern::parse(std::string_view text, VarTable &vars, bool allow_new_vars) {
  Pattern p;
  p.root_ = build(read_sexpr(text), vars, allow_new_vars);
  return p;
}

std::string Pattern::print(const VarTable &vars) const {
  std::string out;
  print_node(root_, vars, out);
  return out;
}

std::vector<Subst> ematch_class(const EGraph &graph, const Pattern &pattern, const VarTable &vars, Id eclass) {
  Subst empty;
  empty.classes.assign(vars.classes.size(), Subst::unbound);
  empty.symbols.assign(vars.symbols.size(), no_symbol);
  std::vector<Subst> out;
  match_node(graph, pattern.root(), eclass, empty, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Match> ematch(const EGraph &graph, const Pattern &pattern, const VarTable &vars) {
  std::vector<Match> matches;
  const auto &root = pattern.root();
  for (Id id : graph.class_ids()) {
    if (!root.is_var) {
      const auto &nodes = graph.eclass(id).nodes;
      bool any = std::any_of(nodes.begin(), nodes.end(), [&](const ENode &n) { return n.op == root.op; });
      if (!any) continue;
    }
    for (auto &s : ematch_class(graph, pattern, vars, id)) matches.push_back({id, std::move(s), 0});
  }
  return matches;
}

namespace {

Id instantiate_node(EGraph &graph, const PatternNode &p, const Subst &subst) {
  if (p.is_var) return graph.find(subst.classes.at(p.var));
  ENode node;
  node.op = p.op;
  if (has_symbol(p.op)) node.symbol = p.symbol_var >= 0 ? subst.symbols.at(p.symbol_var) : graph.intern(p.symbol);
  node.arity = static_cast<std::uint8_t>(p.children.size());
  for (std::size_t i = 0; i < p.children.size(); ++i) node.children[i] = instantiate_node(graph, p.children[i], subst);
  return graph.add(node);
}

} // namespace

Id instantiate(EGraph &graph, const Pattern &pattern, const Subst &subst) {
  return instantiate_node(graph, pattern.root(), subst);
}

} // namespace flowsat
