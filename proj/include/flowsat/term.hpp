#pragma once

#include "flowsat/sexpr.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowsat {

enum class Op : std::uint8_t {
  source,
  persist,
  delta,
  old,
  prev,
  chain,
  cross,
  join,
  map,
  filter,
  diamond,
  zipper,
  hole_first,
  hole_second,
  hole_in,
  hole_out,
};

inline constexpr std::size_t op_count = 16;

/// Name used in the textual format: operator keyword, or the hole atom
/// (`first`, `second`, `in`, `out`) for holes.
std::string_view op_name(Op op);

/// Looks up an operator by the keyword that heads its list form.
std::optional<Op> operator_keyword(std::string_view name);

/// Looks up a hole by its atom.
std::optional<Op> hole_keyword(std::string_view name);

/// Number of term children (the function symbol of map/filter is not a child).
int arity(Op op);
bool has_symbol(Op op);
bool is_hole(Op op);

/// Single-input stream operators that may appear along a zipper edge.
bool is_unary_stream_op(Op op);

const std::vector<Op> &unary_stream_ops();

/// Names must match `[a-z_][a-z0-9_]*`.
bool is_valid_name(std::string_view name);

/// Immutable dataflow expression tree. Copies share structure.
class Term {
public:
  static Term source(std::string name);
  static Term hole(Op hole);
  static Term unary(Op op, Term child);
  static Term binary(Op op, Term lhs, Term rhs);
  static Term apply(Op op, std::string fn, Term child);
  /// General constructor; checks arity and symbol presence.
  static Term make(Op op, std::string symbol, std::vector<Term> children);

  Op op() const { return node_->op; }
  const std::string &symbol() const { return node_->symbol; }
  const std::vector<Term> &children() const { return node_->children; }
  const Term &child(std::size_t i) const { return node_->children.at(i); }

  /// Node count of the tree.
  std::size_t size() const { return node_->size; }
  std::size_t depth() const { return node_->depth; }
  std::size_t hash() const { return node_->hash; }

  bool is_leaf() const { return node_->children.empty(); }

  friend bool operator==(const Term &a, const Term &b);
  friend bool operator!=(const Term &a, const Term &b) { return !(a == b); }
  /// Total order consistent with ==; used for deterministic containers.
  friend bool operator<(const Term &a, const Term &b);

private:
  struct Node {
    Op op;
    std::string symbol;
    std::vector<Term> children;
    std::size_t size;
    std::size_t depth;
    std::size_t hash;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term &t) const { return t.hash(); }
};

/// Parses a complete term and validates hole placement.
Term parse_term(std::string_view text);

/// Parses a term without hole placement checks (zipper halves, merge
/// bodies, rule right-hand sides).
Term parse_fragment(std::string_view text);

Term term_from_sexpr(const SExpr &form);

/// Canonical single-space s-expression.
std::string print_term(const Term &t);

std::ostream &operator<<(std::ostream &out, const Term &t);

/// Throws ParseError(hole_placement) if holes occur outside their context.
void check_hole_placement(const Term &t);

std::size_t count_op(const Term &t, Op op);
bool contains_op(const Term &t, Op op);

/// Names of every `source` leaf.
std::set<std::string> source_names(const Term &t);

/// Rebuilds the tree, replacing each leaf by `replace(leaf)`.
Term map_leaves(const Term &t, const std::function<Term(const Term &)> &replace);

/// Every subterm in pre-order (including `t`).
std::vector<Term> subterms(const Term &t);

} // namespace flowsat
