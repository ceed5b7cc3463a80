#pragma once

#include "flowsat/term.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flowsat {

using Id = std::uint32_t;
using SymbolId = std::uint32_t;

/// Symbol id 0 means "no symbol".
inline constexpr SymbolId no_symbol = 0;

struct ENode {
  Op op = Op::source;
  SymbolId symbol = no_symbol;
  std::uint8_t arity = 0;
  std::array<Id, 4> children{};

  std::span<const Id> args() const { return {children.data(), arity}; }
  std::span<Id> args() { return {children.data(), arity}; }

  friend bool operator==(const ENode &a, const ENode &b) {
    return a.op == b.op && a.symbol == b.symbol && a.arity == b.arity && a.children == b.children;
  }
  friend bool operator<(const ENode &a, const ENode &b) {
    if (a.op != b.op) return a.op < b.op;
    if (a.symbol != b.symbol) return a.symbol < b.symbol;
    return a.args().size() != b.args().size() ? a.arity < b.arity : a.children < b.children;
  }
};

struct ENodeHash {
  std::size_t operator()(const ENode &n) const;
};

struct EClass {
  Id id = 0;
  std::vector<ENode> nodes;
  /// (parent node as inserted, class it was inserted into); may be stale
  /// until rebuild() re-canonicalizes them.
  std::vector<std::pair<ENode, Id>> parents;
};

/// Hashconsed e-graph with union-find and deferred congruence repair.
///
/// Mutations (add/merge) leave the graph "dirty"; rebuild() restores the
/// congruence invariant and canonicalizes every class's node list. Queries
/// that walk classes (eclass(), class_ids(), matching, extraction) expect a
/// clean graph.
class EGraph {
public:
  Id add(ENode node);
  Id add_term(const Term &t);

  /// Existing class for a node or term, without inserting anything.
  std::optional<Id> lookup(ENode node) const;
  std::optional<Id> lookup_term(const Term &t) const;

  Id find(Id id) const;

  /// Unions two classes; returns the surviving canonical id.
  Id merge(Id a, Id b);

  void rebuild();
  bool dirty() const { return dirty_; }

  const EClass &eclass(Id id) const;
  /// Canonical class ids in increasing order.
  std::vector<Id> class_ids() const;

  std::size_t class_count() const { return class_count_; }
  /// Nodes across all canonical classes. Exact after rebuild().
  std::size_t node_count() const { return node_count_; }

  /// Bumped by every effective change (new node or merge of distinct classes).
  std::uint64_t version() const { return version_; }

  SymbolId intern(std::string_view symbol);
  std::optional<SymbolId> find_symbol(std::string_view symbol) const;
  const std::string &symbol_name(SymbolId id) const { return symbols_.at(id); }

  ENode canonicalize(ENode node) const;

  /// Builds the Term for a node whose children are given as Terms.
  Term node_term(const ENode &node, std::vector<Term> children) const;

  /// `(class <id> (node <op> [symbol] <child ids>...)...)` per canonical class.
  std::string dump() const;

private:
  std::vector<Id> parent_;
  std::vector<EClass> classes_; ///< indexed by id; only canonical entries are live
  std::unordered_map<ENode, Id, ENodeHash> memo_;
  std::vector<std::pair<ENode, Id>> pending_;
  std::vector<std::string> symbols_{""};
  std::unordered_map<std::string, SymbolId> symbol_ids_;
  std::size_t class_count_ = 0;
  std::size_t node_count_ = 0;
  std::uint64_t version_ = 0;

  bool dirty_ = false;

  Id find_compress(Id id);
  void rebuild_classes();
};

} // namespace flowsat
