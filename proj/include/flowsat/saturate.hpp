#pragma once

#include "flowsat/pattern.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowsat {

/// A directed rewrite. The left side is either a pattern or a programmatic
/// searcher; the right side either a pattern or a programmatic applier.
struct Rewrite {
  using Searcher = std::function<std::vector<Match>(const EGraph &)>;
  /// Returns classes to union with the matched class.
  using Applier = std::function<std::vector<Id>(EGraph &, const Match &)>;
  /// Must not mutate the graph.
  using Condition = std::function<bool(const EGraph &, const Match &)>;

  std::string name;
  VarTable vars;
  std::optional<Pattern> lhs;
  std::optional<Pattern> rhs;
  Searcher searcher;
  Applier applier;
  Condition condition;
  /// Rewrites sharing a non-empty group apply at most once per matched
  /// class per iteration (counting only applications that changed the graph).
  std::string rate_group;
  /// Zipper halves are not ordinary streams (the back half reads in
  /// reverse), so only rules that opt in may match classes inside them.
  bool in_zipper_halves = false;

  std::vector<Match> search(const EGraph &graph) const;
  std::vector<Id> apply(EGraph &graph, const Match &match) const;

  /// Pattern rewrite `lhs => rhs`.
  static Rewrite directed(std::string name, std::string_view lhs, std::string_view rhs);
  /// `name-fwd` (a => b) and `name-rev` (b => a).
  static std::vector<Rewrite> bidirectional(const std::string &name, std::string_view a, std::string_view b);

  std::string describe() const;
};

struct Limits {
  std::size_t max_iters = 16;
  std::size_t max_nodes = 50000;
  std::chrono::milliseconds max_time{10000};
};

enum class StopReason { saturated, iteration_limit, node_limit, time_limit };

std::string_view stop_reason_name(StopReason reason);

struct SaturationReport {
  std::size_t iterations = 0;
  std::size_t nodes = 0;
  std::size_t classes = 0;
  StopReason stop = StopReason::saturated;
  std::chrono::milliseconds elapsed{0};
  /// Effective applications (the graph changed) per rule name.
  std::map<std::string, std::size_t> applications;
  /// Node count after each iteration.
  std::vector<std::size_t> nodes_per_iteration;

  std::size_t applications_of(const std::string &rule) const;
  /// Flat `key=value` lines.
  std::string to_lines() const;
};

using ApplyHook = std::function<void(const Rewrite &, const Match &)>;

/// Classic equality saturation: each iteration matches every rule against
/// the rebuilt graph, filters by condition, applies all surviving matches,
/// then rebuilds. Matches that touch a zipper half are dropped unless the
/// rule opts in. Stops at fixpoint or at the first limit reached.
SaturationReport saturate(EGraph &graph, std::span<const Rewrite> rules, const Limits &limits = {},
                          const ApplyHook &on_apply = {});

} // namespace flowsat
