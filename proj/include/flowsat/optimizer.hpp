#pragma once

#include "flowsat/extract.hpp"
#include "flowsat/interp.hpp"
#include "flowsat/program.hpp"
#include "flowsat/rules.hpp"
#include "flowsat/saturate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flowsat {

struct OptimizeConfig {
  std::string rules = "core";
  Limits limits;
  CostModel cost;
  std::size_t cse_min_size = 2;
  /// Random traces for the post-optimization equivalence check (0 = off).
  std::size_t check_traces = 0;
  std::size_t check_ticks = 8;
  std::uint64_t seed = 0;
  std::size_t batch_max = 3;

  /// Throws Error when a limit or count is out of range.
  void validate() const;
};

struct TraceCheck {
  std::uint64_t seed = 0;
  Equivalence result;
};

struct OptimizeResult {
  TreeMap input_trees;
  TreeMap output_trees;
  ProgramFile program; ///< output trees with shared subtrees re-formed into defs
  double cost_before = 0;
  double cost_after = 0;
  SaturationReport saturation;
  std::vector<TraceCheck> checks;

  bool checks_passed() const;
  /// `key=value` lines: costs, saturation report, check verdicts.
  std::string report_lines() const;
};

/// flatten -> saturate (one e-graph, every sink a root) -> extract each
/// sink -> reform_cse, then the optional random-trace check against the
/// input program.
OptimizeResult optimize_program(const ProgramFile &program, const OptimizeConfig &config,
                                const UdfRegistry &udfs = UdfRegistry::standard());

/// Saturates and extracts a single term.
Term optimize_term(const Term &term, const OptimizeConfig &config, SaturationReport *report = nullptr);

/// Keyed tuples when any join is present, small integers otherwise.
ValueShape trace_shape(const ProgramFile &program);

/// Runs both programs on `traces` random traces (seeds seed, seed+1, ...).
/// Throws Error on sink mismatch.
std::vector<TraceCheck> check_programs(const ProgramFile &a, const ProgramFile &b, std::size_t traces,
                                       std::size_t ticks, std::uint64_t seed, std::size_t batch_max = 3,
                                       const UdfRegistry &udfs = UdfRegistry::standard());

} // namespace flowsat
