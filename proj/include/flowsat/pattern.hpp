#pragma once

#include "flowsat/egraph.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace flowsat {

/// Variable names shared between the two sides of a rewrite. Class
/// variables bind e-classes (`?a` in a stream position); symbol variables
/// bind function names (`?f` in the name slot of map/filter).
struct VarTable {
  std::vector<std::string> classes;
  std::vector<std::string> symbols;

  int class_index(std::string_view name) const;
  int symbol_index(std::string_view name) const;
};

struct PatternNode {
  bool is_var = false;
  int var = -1; ///< class variable index when is_var
  Op op = Op::source;
  std::string symbol;     ///< constant symbol (sources, map/filter names)
  int symbol_var = -1;    ///< symbol variable index, or -1 for a constant
  std::vector<PatternNode> children;
};

/// Bindings for one match. Unbound slots hold `unbound`.
struct Subst {
  static constexpr Id unbound = static_cast<Id>(-1);
  std::vector<Id> classes;
  std::vector<SymbolId> symbols;

  friend bool operator==(const Subst &, const Subst &) = default;
  friend auto operator<=>(const Subst &, const Subst &) = default;
};

struct Match {
  Id eclass = 0;
  Subst subst;
  int tag = 0; ///< free for programmatic searchers
};

class Pattern {
public:
  /// Parses a term-shaped pattern. New variables are appended to `vars`
  /// unless `allow_new_vars` is false, in which case an unknown variable
  /// is an error (right-hand sides).
  static Pattern parse(std::string_view text, VarTable &vars, bool allow_new_vars = true);

  const PatternNode &root() const { return root_; }
  std::string print(const VarTable &vars) const;

private:
  PatternNode root_;
};

/// Every (class, substitution) at which the pattern occurs. Requires a
/// clean graph. Each distinct substitution per class is reported once.
std::vector<Match> ematch(const EGraph &graph, const Pattern &pattern, const VarTable &vars);

/// Matches rooted at a single class.
std::vector<Subst> ematch_class(const EGraph &graph, const Pattern &pattern, const VarTable &vars, Id eclass);

/// Adds the pattern instantiated under `subst`; returns its class.
Id instantiate(EGraph &graph, const Pattern &pattern, const Subst &subst);

} // namespace flowsat
