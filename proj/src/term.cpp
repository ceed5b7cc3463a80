#include "flowsat/term.hpp"

#include "flowsat/error.hpp"

#include <algorithm>
#include <array>
#include <ostream>

namespace flowsat {

namespace {

struct OpInfo {
  std::string_view name;
  int arity;
  bool symbol;
};

constexpr std::array<OpInfo, op_count> op_table{{
    {"source", 0, true},
    {"persist", 1, false},
    {"delta", 1, false},
    {"old", 1, false},
    {"prev", 1, false},
    {"chain", 2, false},
    {"cross", 2, false},
    {"join", 2, false},
    {"map", 1, true},
    {"filter", 1, true},
    {"diamond", 4, false},
    {"zipper", 2, false},
    {"first", 0, false},
    {"second", 0, false},
    {"in", 0, false},
    {"out", 0, false},
}};

const OpInfo &info(Op op) { return op_table[static_cast<std::size_t>(op)]; }

std::size_t combine(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

void print_into(const Term &t, std::string &out) {
  if (t.op() == Op::source) {
    out += t.symbol();
    return;
  }
  if (is_hole(t.op())) {
    out += op_name(t.op());
    return;
  }
  out += '(';
  out += op_name(t.op());
  if (has_symbol(t.op())) {
    out += ' ';
    out += t.symbol();
  }
  for (const auto &c : t.children()) {
    out += ' ';
    print_into(c, out);
  }
  out += ')';
}

void check_holes(const Term &t, bool in_zipper, bool in_merge) {
  switch (t.op()) {
  case Op::hole_in:
  case Op::hole_out:
    if (!in_zipper)
      throw ParseError(ParseErrorKind::hole_placement,
                       std::string("hole '") + std::string(op_name(t.op())) + "' outside a zipper");
    return;
  case Op::hole_first:
  case Op::hole_second:
    if (!in_merge)
      throw ParseError(ParseErrorKind::hole_placement,
                       std::string("hole '") + std::string(op_name(t.op())) +
                           "' outside a diamond merge");
    return;
  case Op::zipper:
    for (const auto &c : t.children()) check_holes(c, true, false);
    return;
  case Op::diamond:
    check_holes(t.child(0), false, false);
    check_holes(t.child(1), false, false);
    check_holes(t.child(2), false, false);
    check_holes(t.child(3), false, true);
    return;
  default:
    for (const auto &c : t.children()) check_holes(c, in_zipper, in_merge);
  }
}

} // namespace

std::string_view op_name(Op op) { return info(op).name; }

std::optional<Op> operator_keyword(std::string_view name) {
  for (std::size_t i = 0; i < op_count; ++i) {
    auto op = static_cast<Op>(i);
    if (op == Op::source || is_hole(op)) continue;
    if (op_table[i].name == name) return op;
  }
  return std::nullopt;
}

std::optional<Op> hole_keyword(std::string_view name) {
  for (Op op : {Op::hole_first, Op::hole_second, Op::hole_in, Op::hole_out})
    if (op_name(op) == name) return op;
  return std::nullopt;
}

int arity(Op op) { return info(op).arity; }
bool has_symbol(Op op) { return info(op).symbol; }

bool is_hole(Op op) {
  return op == Op::hole_first || op == Op::hole_second || op == Op::hole_in || op == Op::hole_out;
}

bool is_unary_stream_op(Op op) {
  switch (op) {
  case Op::persist:
  case Op::delta:
  case Op::old:
  case Op::prev:
  case Op::map:
  case Op::filter:
    return true;
  default:
    return false;
  }
}

const std::vector<Op> &unary_stream_ops() {
  static const std::vector<Op> ops{Op::persist, Op::delta, Op::old, Op::prev, Op::map, Op::filter};
  return ops;
}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  auto head = name.front();
  if (!(head == '_' || (head >= 'a' && head <= 'z'))) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return c == '_' || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); });
}

Term Term::make(Op op, std::string symbol, std::vector<Term> children) {
  if (static_cast<int>(children.size()) != arity(op))
    throw ParseError(ParseErrorKind::arity, std::string(op_name(op)) + " takes " +
                                                std::to_string(arity(op)) + " input(s), got " +
                                                std::to_string(children.size()));
  if (has_symbol(op) && symbol.empty())
    throw ParseError(ParseErrorKind::arity, std::string(op_name(op)) + " requires a name");
  if (!has_symbol(op)) symbol.clear();

  std::size_t size = 1;
  std::size_t depth = 0;
  std::size_t h = std::hash<std::string>{}(symbol);
  h = combine(h, static_cast<std::size_t>(op));
  for (const auto &c : children) {
    size += c.size();
    depth = std::max(depth, c.depth());
    h = combine(h, c.hash());
  }
  auto node = std::make_shared<const Node>(
      Node{op, std::move(symbol), std::move(children), size, depth + 1, h});
  return Term(std::move(node));
}

Term Term::source(std::string name) { return make(Op::source, std::move(name), {}); }
Term Term::hole(Op hole) { return make(hole, {}, {}); }
Term Term::unary(Op op, Term child) { return make(op, {}, {std::move(child)}); }
Term Term::binary(Op op, Term lhs, Term rhs) { return make(op, {}, {std::move(lhs), std::move(rhs)}); }
Term Term::apply(Op op, std::string fn, Term child) { return make(op, std::move(fn), {std::move(child)}); }

bool operator==(const Term &a, const Term &b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.op() != b.op() || a.size() != b.size() || a.symbol() != b.symbol())
    return false;
  return a.children() == b.children();
}

bool operator<(const Term &a, const Term &b) {
  if (a.node_ == b.node_) return false;
  if (a.op() != b.op()) return a.op() < b.op();
  if (a.symbol() != b.symbol()) return a.symbol() < b.symbol();
  return std::lexicographical_compare(a.children().begin(), a.children().end(), b.children().begin(),
                                      b.children().end());
}

Term term_from_sexpr(const SExpr &form) {
  if (form.is_atom()) {
    if (auto hole = hole_keyword(form.atom)) return Term::hole(*hole);
    if (operator_keyword(form.atom))
      throw ParseError(ParseErrorKind::bad_name, "operator '" + form.atom + "' used as a stream name",
                       form.line, form.column);
    if (!is_valid_name(form.atom))
      throw ParseError(ParseErrorKind::bad_name, "invalid name '" + form.atom + "'", form.line,
                       form.column);
    return Term::source(form.atom);
  }
  if (form.items.empty()) throw ParseError(ParseErrorKind::syntax, "empty list", form.line, form.column);
  const auto &head = form.items.front();
  if (head.is_list)
    throw ParseError(ParseErrorKind::syntax, "expected an operator name", head.line, head.column);
  auto op = operator_keyword(head.atom);
  if (!op)
    throw ParseError(ParseErrorKind::unknown_operator, "unknown operator '" + head.atom + "'", head.line,
                     head.column);

  std::size_t first_child = 1;
  std::string symbol;
  if (has_symbol(*op)) {
    if (form.items.size() < 2 || form.items[1].is_list)
      throw ParseError(ParseErrorKind::arity, head.atom + " requires a function name", form.line,
                       form.column);
    symbol = form.items[1].atom;
    if (!is_valid_name(symbol))
      throw ParseError(ParseErrorKind::bad_name, "invalid function name '" + symbol + "'",
                       form.items[1].line, form.items[1].column);
    first_child = 2;
  }
  std::size_t given = form.items.size() - first_child;
  if (static_cast<int>(given) != arity(*op))
    throw ParseError(ParseErrorKind::arity,
                     head.atom + " takes " + std::to_string(arity(*op)) + " input(s), got " +
                         std::to_string(given),
                     form.line, form.column);
  std::vector<Term> children;
  children.reserve(given);
  for (std::size_t i = first_child; i < form.items.size(); ++i)
    children.push_back(term_from_sexpr(form.items[i]));
  return Term::make(*op, std::move(symbol), std::move(children));
}

Term parse_fragment(std::string_view text) { return term_from_sexpr(read_sexpr(text)); }

Term parse_term(std::string_view text) {
  auto form = read_sexpr(text);
  auto t = term_from_sexpr(form);
  try {
    check_hole_placement(t);
  } catch (const ParseError &e) {
    throw ParseError(e.kind(), e.what(), form.line, form.column);
  }
  return t;
}

void check_hole_placement(const Term &t) { check_holes(t, false, false); }

std::string print_term(const Term &t) {
  std::string out;
  out.reserve(t.size() * 8);
  print_into(t, out);
  return out;
}

std::ostream &operator<<(std::ostream &out, const Term &t) { return out << print_term(t); }

std::size_t count_op(const Term &t, Op op) {
  std::size_t n = t.op() == op ? 1 : 0;
  for (const auto &c : t.children()) n += count_op(c, op);
  return n;
}

bool contains_op(const Term &t, Op op) {
  if (t.op() == op) return true;
  return std::any_of(t.children().begin(), t.children().end(),
                     [op](const Term &c) { return contains_op(c, op); });
}

std::set<std::string> source_names(const Term &t) {
  std::set<std::string> names;
  std::function<void(const Term &)> walk = [&](const Term &n) {
    if (n.op() == Op::source) names.insert(n.symbol());
    for (const auto &c : n.children()) walk(c);
  };
  walk(t);
  return names;
}

Term map_leaves(const Term &t, const std::function<Term(const Term &)> &replace) {
  if (t.is_leaf()) return replace(t);
  std::vector<Term> children;
  children.reserve(t.children().size());
  bool changed = false;
  for (const auto &c : t.children()) {
    children.push_back(map_leaves(c, replace));
    changed = changed || children.back() != c;
  }
  if (!changed) return t;
  return Term::make(t.op(), t.symbol(), std::move(children));
}

std::vector<Term> subterms(const Term &t) {
  std::vector<Term> out;
  std::function<void(const Term &)> walk = [&](const Term &n) {
    out.push_back(n);
    for (const auto &c : n.children()) walk(c);
  };
  walk(t);
  return out;
}

} // namespace flowsat
