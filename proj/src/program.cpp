#include "flowsat/program.hpp"

#include "flowsat/error.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace flowsat {

namespace {

struct Located {
  int line;
  int column;
};

// Stream names may not shadow keywords; sink names are a separate namespace.
const SExpr &expect_name(const SExpr &form, std::size_t index, std::string_view what) {
  if (form.items.size() <= index || form.items[index].is_list)
    throw ParseError(ParseErrorKind::syntax, std::string(what) + " expects a name", form.line, form.column);
  const auto &name = form.items[index];
  bool keyword = what != "sink" && (operator_keyword(name.atom) || hole_keyword(name.atom));
  if (!is_valid_name(name.atom) || keyword)
    throw ParseError(ParseErrorKind::bad_name, "invalid name '" + name.atom + "'", name.line, name.column);
  return name;
}

void check_references(const ProgramFile &program, const std::vector<Located> *def_pos,
                      const std::vector<Located> *sink_pos) {
  std::set<std::string> declared(program.sources.begin(), program.sources.end());
  std::map<std::string, std::size_t> def_index;
  for (std::size_t i = 0; i < program.defs.size(); ++i) def_index[program.defs[i].name] = i;
  bool strict = !program.sources.empty();

  auto check = [&](const Term &body, std::size_t self, const Located &at) {
    for (const auto &name : source_names(body)) {
      auto it = def_index.find(name);
      if (it != def_index.end()) {
        if (it->second == self)
          throw ParseError(ParseErrorKind::cyclic_reference, "def '" + name + "' refers to itself", at.line,
                           at.column);
        if (it->second > self)
          throw ParseError(ParseErrorKind::cyclic_reference,
                           "reference to '" + name + "' before its definition", at.line, at.column);
        continue;
      }
      if (strict && !declared.count(name))
        throw ParseError(ParseErrorKind::undefined_reference, "undeclared stream '" + name + "'", at.line,
                         at.column);
    }
  };

  for (std::size_t i = 0; i < program.defs.size(); ++i) {
    check(program.defs[i].body, i, def_pos ? (*def_pos)[i] : Located{0, 0});
    check_hole_placement(program.defs[i].body);
  }
  for (std::size_t i = 0; i < program.sinks.size(); ++i) {
    check(program.sinks[i].body, program.defs.size(), sink_pos ? (*sink_pos)[i] : Located{0, 0});
    check_hole_placement(program.sinks[i].body);
  }
}

// Holes not bound by an enclosing zipper (in/out) or diamond merge
// (first/second).
bool has_free_holes(const Term &t, bool in_bound, bool merge_bound) {
  switch (t.op()) {
  case Op::hole_in:
  case Op::hole_out:
    return !in_bound;
  case Op::hole_first:
  case Op::hole_second:
    return !merge_bound;
  case Op::zipper:
    return has_free_holes(t.child(0), true, merge_bound) || has_free_holes(t.child(1), true, merge_bound);
  case Op::diamond:
    return has_free_holes(t.child(0), in_bound, merge_bound) ||
           has_free_holes(t.child(1), in_bound, merge_bound) ||
           has_free_holes(t.child(2), in_bound, merge_bound) || has_free_holes(t.child(3), in_bound, true);
  default:
    return std::any_of(t.children().begin(), t.children().end(),
                       [&](const Term &c) { return has_free_holes(c, in_bound, merge_bound); });
  }
}

Term replace_subtree(const Term &t, const Term &target, const Term &with) {
  if (t.size() < target.size()) return t;
  if (t == target) return with;
  if (t.is_leaf()) return t;
  std::vector<Term> children;
  bool changed = false;
  for (const auto &c : t.children()) {
    children.push_back(replace_subtree(c, target, with));
    changed = changed || children.back() != c;
  }
  return changed ? Term::make(t.op(), t.symbol(), std::move(children)) : t;
}

} // namespace

const Definition *ProgramFile::find_def(std::string_view name) const {
  for (const auto &d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

const Definition *ProgramFile::find_sink(std::string_view name) const {
  for (const auto &s : sinks)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<std::string> ProgramFile::sink_names() const {
  std::vector<std::string> names;
  for (const auto &s : sinks) names.push_back(s.name);
  return names;
}

std::vector<std::string> ProgramFile::external_sources() const {
  std::set<std::string> names(sources.begin(), sources.end());
  auto collect = [&](const Term &body) {
    for (const auto &n : source_names(body))
      if (!find_def(n)) names.insert(n);
  };
  for (const auto &d : defs) collect(d.body);
  for (const auto &s : sinks) collect(s.body);
  return {names.begin(), names.end()};
}

ProgramFile parse_program(std::string_view text) {
  ProgramFile program;
  std::vector<Located> def_pos;
  std::vector<Located> sink_pos;
  std::set<std::string> def_names;
  std::set<std::string> sink_names;

  for (const auto &form : read_sexprs(text)) {
    if (!form.is_list || form.items.empty() || form.items.front().is_list)
      throw ParseError(ParseErrorKind::syntax, "expected (def ...), (sink ...) or (source ...)", form.line,
                       form.column);
    const auto &keyword = form.items.front().atom;
    if (keyword == "source") {
      if (form.items.size() != 2)
        throw ParseError(ParseErrorKind::syntax, "source takes one name", form.line, form.column);
      const auto &name = expect_name(form, 1, "source");
      if (std::find(program.sources.begin(), program.sources.end(), name.atom) != program.sources.end() ||
          def_names.count(name.atom))
        throw ParseError(ParseErrorKind::duplicate, "duplicate name '" + name.atom + "'", name.line,
                         name.column);
      program.sources.push_back(name.atom);
    } else if (keyword == "def" || keyword == "sink") {
      if (form.items.size() != 3)
        throw ParseError(ParseErrorKind::syntax, keyword + " takes a name and a term", form.line,
                         form.column);
      const auto &name = expect_name(form, 1, keyword);
      auto body = term_from_sexpr(form.items[2]);
      if (keyword == "def") {
        bool clash = !def_names.insert(name.atom).second ||
                     std::find(program.sources.begin(), program.sources.end(), name.atom) !=
                         program.sources.end();
        if (clash)
          throw ParseError(ParseErrorKind::duplicate, "duplicate def '" + name.atom + "'", name.line,
                           name.column);
        program.defs.push_back({name.atom, std::move(body)});
        def_pos.push_back({form.line, form.column});
      } else {
        if (!sink_names.insert(name.atom).second)
          throw ParseError(ParseErrorKind::duplicate, "duplicate sink '" + name.atom + "'", name.line,
                           name.column);
        program.sinks.push_back({name.atom, std::move(body)});
        sink_pos.push_back({form.line, form.column});
      }
    } else {
      throw ParseError(ParseErrorKind::syntax, "unknown top-level form '" + keyword + "'", form.line,
                       form.column);
    }
  }
  // Declarations may follow their first use; check references once all are known.
  check_references(program, &def_pos, &sink_pos);
  return program;
}

void validate_program(const ProgramFile &program) {
  std::set<std::string> seen;
  for (const auto &d : program.defs)
    if (!seen.insert(d.name).second)
      throw ParseError(ParseErrorKind::duplicate, "duplicate def '" + d.name + "'");
  seen.clear();
  for (const auto &s : program.sinks)
    if (!seen.insert(s.name).second)
      throw ParseError(ParseErrorKind::duplicate, "duplicate sink '" + s.name + "'");
  check_references(program, nullptr, nullptr);
}

std::string print_program(const ProgramFile &program) {
  std::string out;
  for (const auto &s : program.sources) out += "(source " + s + ")\n";
  for (const auto &d : program.defs) out += "(def " + d.name + " " + print_term(d.body) + ")\n";
  for (const auto &s : program.sinks) out += "(sink " + s.name + " " + print_term(s.body) + ")\n";
  return out;
}

TreeMap flatten(const ProgramFile &program) {
  std::unordered_map<std::string, Term> resolved;
  auto inline_refs = [&](const Term &body) {
    return map_leaves(body, [&](const Term &leaf) {
      if (leaf.op() != Op::source) return leaf;
      auto it = resolved.find(leaf.symbol());
      return it == resolved.end() ? leaf : it->second;
    });
  };
  for (const auto &d : program.defs) resolved.insert_or_assign(d.name, inline_refs(d.body));
  TreeMap trees;
  for (const auto &s : program.sinks) trees.insert_or_assign(s.name, inline_refs(s.body));
  return trees;
}

ProgramFile program_from_trees(const TreeMap &trees) {
  ProgramFile program;
  for (const auto &[name, tree] : trees) program.sinks.push_back({name, tree});
  return program;
}

ProgramFile reform_cse(const TreeMap &trees, std::size_t min_size) {
  if (min_size == 0) min_size = 1;
  ProgramFile program = program_from_trees(trees);

  std::set<std::string> taken;
  for (const auto &[name, tree] : trees) {
    taken.insert(name);
    for (const auto &n : source_names(tree)) taken.insert(n);
  }
  std::set<std::string> def_names;
  std::size_t counter = 0;
  auto fresh_name = [&] {
    std::string name;
    do {
      name = "d" + std::to_string(counter++);
    } while (taken.count(name));
    taken.insert(name);
    return name;
  };

  for (;;) {
    std::unordered_map<Term, std::size_t, TermHash> counts;
    auto tally = [&](const Term &body) {
      for (const auto &t : subterms(body)) {
        if (t.size() < min_size || t.op() == Op::zipper || is_hole(t.op())) continue;
        if (t.op() == Op::source && def_names.count(t.symbol())) continue;
        if (has_free_holes(t, false, false)) continue;
        ++counts[t];
      }
    };
    for (const auto &d : program.defs) tally(d.body);
    for (const auto &s : program.sinks) tally(s.body);

    std::vector<Term> repeated;
    for (const auto &[t, n] : counts)
      if (n >= 2) repeated.push_back(t);
    if (repeated.empty()) break;

    // Innermost first: only the smallest repeated subtrees are hoisted this
    // round; larger ones are re-counted against the new references.
    std::size_t smallest = repeated.front().size();
    for (const auto &t : repeated) smallest = std::min(smallest, t.size());
    std::erase_if(repeated, [&](const Term &t) { return t.size() != smallest; });
    std::sort(repeated.begin(), repeated.end(),
              [](const Term &a, const Term &b) { return print_term(a) < print_term(b); });

    for (const auto &t : repeated) {
      auto name = fresh_name();
      auto ref = Term::source(name);
      for (auto &d : program.defs) d.body = replace_subtree(d.body, t, ref);
      for (auto &s : program.sinks) s.body = replace_subtree(s.body, t, ref);
      program.defs.push_back({name, t});
      def_names.insert(name);
    }
  }
  return program;
}

} // namespace flowsat
