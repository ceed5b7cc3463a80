#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace flowsat {

/// Minimal s-expression tree: either an atom or a list, with the source
/// position of its first character.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 1;
  int column = 1;

  bool is_atom() const { return !is_list; }
};

/// Reads every top-level form. `;` starts a comment running to end of line.
std::vector<SExpr> read_sexprs(std::string_view text);

/// Reads exactly one top-level form.
SExpr read_sexpr(std::string_view text);

} // namespace flowsat
