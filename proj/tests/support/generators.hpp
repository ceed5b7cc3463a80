#pragma once

#include "flowsat/program.hpp"
#include "flowsat/term.hpp"

#include <random>
#include <string>
#include <vector>

namespace gen {

using flowsat::Op;
using flowsat::Term;

struct TermShape {
  std::vector<std::string> sources{"a", "b", "c"};
  std::vector<std::string> maps{"f", "g"};
  std::vector<std::string> filters{"p", "q"};
  bool cross = true;
  bool join = false;     ///< join only over keyed inputs
  bool stateful = true;  ///< persist/old/prev/delta
};

inline std::size_t pick(std::mt19937_64 &rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

// Streams whose elements are keyed tuples when the sources are keyed: join
// output is keyed, maps keep the key, but cross output is not.
inline Term random_term(std::mt19937_64 &rng, int depth, const TermShape &shape, bool keyed = false) {
  if (depth <= 0 || pick(rng, 4) == 0) return Term::source(shape.sources[pick(rng, shape.sources.size())]);
  std::vector<int> choices{0, 1, 2}; // chain, map, filter
  if (shape.stateful) choices.insert(choices.end(), {3, 4, 5, 6});
  if (shape.cross && !keyed) choices.push_back(7);
  if (shape.join) choices.push_back(8);
  switch (choices[pick(rng, choices.size())]) {
  case 0:
    return Term::binary(Op::chain, random_term(rng, depth - 1, shape, keyed), random_term(rng, depth - 1, shape, keyed));
  case 1:
    return Term::apply(Op::map, shape.maps[pick(rng, shape.maps.size())], random_term(rng, depth - 1, shape, keyed));
  case 2:
    return Term::apply(Op::filter, shape.filters[pick(rng, shape.filters.size())],
                       random_term(rng, depth - 1, shape, keyed));
  case 3:
    return Term::unary(Op::persist, random_term(rng, depth - 1, shape, keyed));
  case 4:
    return Term::unary(Op::old, random_term(rng, depth - 1, shape, keyed));
  case 5:
    return Term::unary(Op::prev, random_term(rng, depth - 1, shape, keyed));
  case 6:
    return Term::unary(Op::delta, random_term(rng, depth - 1, shape, keyed));
  case 7:
    return Term::binary(Op::cross, random_term(rng, depth - 1, shape, keyed), random_term(rng, depth - 1, shape, keyed));
  default:
    return Term::binary(Op::join, random_term(rng, depth - 1, shape, true), random_term(rng, depth - 1, shape, true));
  }
}

// A program with shared defs and several sinks; some sinks repeat
// structure so that flatten/reform has work to do.
inline flowsat::ProgramFile random_program(std::mt19937_64 &rng, const TermShape &shape = {}) {
  flowsat::ProgramFile program;
  TermShape with_defs = shape;
  std::size_t defs = pick(rng, 3);
  for (std::size_t i = 0; i < defs; ++i) {
    auto body = random_term(rng, 2, with_defs);
    auto name = "s" + std::to_string(i);
    program.defs.push_back({name, body});
    with_defs.sources.push_back(name);
  }
  std::size_t sinks = 2 + pick(rng, 2);
  Term common = random_term(rng, 2, with_defs);
  for (std::size_t i = 0; i < sinks; ++i) {
    Term body = random_term(rng, 2, with_defs);
    if (pick(rng, 2) == 0) body = Term::binary(pick(rng, 2) ? Op::chain : Op::cross, common, body);
    program.sinks.push_back({"out" + std::to_string(i), body});
  }
  return program;
}

} // namespace gen
