#pragma once

#include "flowsat/rules.hpp"
#include "flowsat/term.hpp"

namespace flowsat {

/// One edge of a diamond as two straight-line halves. The front half has
/// its input as children and bottoms out at `in`; the back half is
/// reversed (consumers as children) and bottoms out at `out`. Data flows
/// through the front from `in` outward, then through the back from its
/// outermost operator inward.
struct Zipper {
  Term front;
  Term back;

  /// Throws ParseError(hole_placement) on malformed halves.
  static Zipper from_term(const Term &t);
  Term to_term() const;

  /// The edge applied to `input` as an ordinary term.
  Term apply(const Term &input) const;
};

/// `(diamond shared edge1 edge2 merge)`: `first`/`second` in the merge
/// stand for the outputs of edge1/edge2.
struct DiamondTerm {
  Term shared;
  Zipper edge1;
  Zipper edge2;
  Term merge;

  static DiamondTerm from_term(const Term &t);
  Term to_term() const;
};

/// The tee'd tree the diamond stands for (shared input duplicated).
Term desugar(const DiamondTerm &d);

/// Desugars every diamond inside `t`, innermost first.
Term desugar_all(const Term &t);

/// Cursor shifts for every unary stream operator. `-fwd` moves the back
/// half's outermost operator onto the front; `-rev` undoes it. They share a
/// rate group so each zipper class moves at most once per iteration.
RuleSet shift_rules();

/// Moves an edge's last operator, isolated as `(op out)` in the back half,
/// into the merge around the edge's hole.
Rewrite inline_rule();

/// Moves an operator isolated as `(op in)` at the front of both edges into
/// the shared input.
Rewrite hoist_rule();

/// inline, hoist, then the shift rules.
RuleSet diamond_rules();

} // namespace flowsat
