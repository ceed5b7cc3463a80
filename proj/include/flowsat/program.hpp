#pragma once

#include "flowsat/term.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace flowsat {

struct Definition {
  std::string name;
  Term body;
};

/// Named pipelines plus sinks. A def name used as a stream inside a later
/// def or a sink is a reference; several references to one def form a tee.
struct ProgramFile {
  std::vector<std::string> sources; ///< explicit `(source name)` declarations
  std::vector<Definition> defs;     ///< in dependency order
  std::vector<Definition> sinks;

  const Definition *find_def(std::string_view name) const;
  const Definition *find_sink(std::string_view name) const;
  std::vector<std::string> sink_names() const;

  /// External stream names read by the program (declared or implicit).
  std::vector<std::string> external_sources() const;
};

/// Sink name to standalone tree.
using TreeMap = std::map<std::string, Term>;

/// Parses `(source n)`, `(def n term)` and `(sink n term)` forms.
///
/// Undeclared names are implicit external sources unless the file declares
/// at least one `(source ...)`, in which case every free name must be
/// declared. A def may only reference defs that precede it.
ProgramFile parse_program(std::string_view text);

/// Re-runs the structural checks performed by parse_program.
void validate_program(const ProgramFile &program);

std::string print_program(const ProgramFile &program);

/// Inlines every def reference, duplicating shared pipelines per consumer.
TreeMap flatten(const ProgramFile &program);

/// Wraps a tree map as a program with no defs.
ProgramFile program_from_trees(const TreeMap &trees);

/// Hoists every subtree of at least `min_size` nodes that occurs two or
/// more times into a def, innermost first. flatten() undoes it exactly.
ProgramFile reform_cse(const TreeMap &trees, std::size_t min_size = 2);

} // namespace flowsat
