#pragma once

#include "flowsat/saturate.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace flowsat {

struct RuleSet {
  std::string name;
  std::vector<Rewrite> rules;

  /// Appends another set's rules; names must stay unique.
  RuleSet &operator+=(const RuleSet &other);
  const Rewrite *find(std::string_view rule) const;
};

/// R1-R7 in both directions plus the conditional incrementalization R8:
///
///   R1  (delta (persist ?a))          <=> ?a
///   R2  (persist ?a)                  <=> (chain (old ?a) ?a)
///   R3  (cross (chain ?a ?b) ?c)      <=> (chain (cross ?a ?c) (cross ?b ?c))
///   R4  (cross ?a (chain ?b ?c))      <=> (chain (cross ?a ?b) (cross ?a ?c))
///   R5  (chain (chain ?a ?b) ?c)      <=> (chain ?a (chain ?b ?c))
///   R6  (old ?a)                      <=> (prev (persist ?a))
///   R7  (cross (prev ?a) (prev ?b))   <=> (prev (cross ?a ?b))
///   R8  (chain (prev ?a) ?b)           => (persist ?b)
///       when the matched class is the class bound to ?a
///
/// R1-rev has a bare variable on its left, so it is a searcher over every
/// class; it comes last so the other rules see each iteration's graph first.
RuleSet core_rules();

/// R3j/R4j (join distributes over chain on either input) and R7j (join
/// commutes with prev).
RuleSet join_rules();

/// map/filter distribute over chain and commute with prev.
RuleSet unary_rules();

/// The conditional R8 rewrite on its own.
Rewrite incrementalize_rule();

/// `core`, `join`, `unary`, `diamond`, `shift`, `all`, single rule names
/// (`R1` for both directions, `R1-fwd` for one), or a comma-separated list
/// of those. Empty or `none` selects no rules. Throws Error for unknown
/// names.
RuleSet rules_by_name(std::string_view names);

} // namespace flowsat
