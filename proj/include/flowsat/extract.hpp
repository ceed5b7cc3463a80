#pragma once

#include "flowsat/egraph.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace flowsat {

/// Node-count cost with per-operator weights.
///
/// Defaults: every operator weighs 1 except delta (100), persist (4) and
/// the diamond plumbing (diamond, zipper and the four holes, 0.1 each).
/// With `diamond_shared_once` a diamond's shared input is paid for once;
/// otherwise once per edge.
struct CostModel {
  double default_weight = 1.0;
  std::map<Op, double> weights{
      {Op::delta, 100.0},      {Op::persist, 4.0},     {Op::diamond, 0.1},
      {Op::zipper, 0.1},       {Op::hole_first, 0.1},  {Op::hole_second, 0.1},
      {Op::hole_in, 0.1},      {Op::hole_out, 0.1},
  };
  bool diamond_shared_once = true;

  double weight(Op op) const;

  /// Accepts operator keywords, hole atoms, `source`, and `hole-in` style
  /// names. Throws Error on unknown names or non-positive weights.
  void set_weight(std::string_view op, double weight);

  /// `op = weight` per line; `#` and `;` start comments.
  void load_config(std::string_view text);

  /// Every operator weighs 1.
  static CostModel unit();
};

double term_cost(const Term &t, const CostModel &model);

/// Bottom-up least-cost selection over a clean e-graph. Classes reachable
/// only through cycles keep infinite cost. Ties go to the lexicographically
/// smallest canonical printing.
class Extractor {
public:
  Extractor(const EGraph &graph, CostModel model);

  bool reachable(Id eclass) const;
  double cost(Id eclass) const;
  /// Throws Error when the class has no finite-cost term.
  Term best(Id eclass) const;

private:
  const EGraph &graph_;
  CostModel model_;
  std::vector<double> cost_;
  std::vector<ENode> choice_;
  std::vector<std::string> key_;
  mutable std::map<Id, Term> built_;

  double node_cost(const ENode &node) const;
  std::string node_key(const ENode &node) const;
};

Term extract_best(const EGraph &graph, Id root, const CostModel &model = {});

} // namespace flowsat
