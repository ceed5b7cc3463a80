#pragma once

#include "flowsat/program.hpp"
#include "flowsat/value.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowsat {

/// Values delivered by one source in one tick, in emission order.
using Batch = std::vector<Value>;

/// Input batches per tick; a source missing from a tick delivers nothing.
struct TickTrace {
  std::vector<std::map<std::string, Batch>> ticks;

  std::size_t size() const { return ticks.size(); }
};

/// Per tick, the sequence each sink received.
struct OutputTrace {
  std::vector<std::map<std::string, std::vector<Value>>> ticks;
};

using MapFn = std::function<Value(const Value &)>;
using FilterFn = std::function<bool(const Value &)>;

class UdfRegistry {
public:
  void add_map(std::string name, MapFn fn);
  void add_filter(std::string name, FilterFn fn);

  const MapFn *find_map(std::string_view name) const;
  const FilterFn *find_filter(std::string_view name) const;

  std::vector<std::string> map_names() const;
  std::vector<std::string> filter_names() const;

  /// with_school/berkeley/stanford plus generic maps f, g, h and filters
  /// p, q, r. All are total over integers, atoms and tuples; maps keep the
  /// first component of a tuple so keyed streams stay joinable.
  static UdfRegistry standard();

private:
  std::map<std::string, MapFn, std::less<>> maps_;
  std::map<std::string, FilterFn, std::less<>> filters_;
};

/// Executes the program tick by tick. Defs are evaluated once per tick and
/// shared by every consumer; diamonds run through their desugaring.
OutputTrace run(const ProgramFile &program, const TickTrace &inputs, const UdfRegistry &udfs);

/// Runs a single term, returning its output per tick.
std::vector<std::vector<Value>> run_term(const Term &term, const TickTrace &inputs, const UdfRegistry &udfs);

enum class CompareMode { multiset, ordered };

struct Divergence {
  std::size_t tick = 0; ///< 1-based
  std::string sink;
  std::vector<Value> expected;
  std::vector<Value> actual;

  std::string describe() const;
};

struct Equivalence {
  bool equivalent = true;
  std::optional<Divergence> divergence;

  explicit operator bool() const { return equivalent; }
};

/// Compares two output traces; reports the earliest diverging (tick, sink).
Equivalence compare_outputs(const OutputTrace &a, const OutputTrace &b, CompareMode mode);

/// Throws Error when the programs' sink names differ.
Equivalence equivalent(const ProgramFile &a, const ProgramFile &b, const TickTrace &inputs,
                       const UdfRegistry &udfs, CompareMode mode = CompareMode::multiset);

Equivalence equivalent_terms(const Term &a, const Term &b, const TickTrace &inputs, const UdfRegistry &udfs,
                             CompareMode mode = CompareMode::multiset);

enum class ValueShape {
  integers, ///< small integers in [0, 4]
  keyed,    ///< (tuple key payload) with key in [0, 3] and payload in [0, 2]
};

/// Deterministic in `seed`. Batch sizes are uniform in [0, batch_max].
TickTrace random_trace(std::span<const std::string> sources, std::size_t ticks, std::uint64_t seed,
                       std::size_t batch_max, ValueShape shape = ValueShape::integers);

/// `(tick (name value...) ...)` per tick.
TickTrace parse_trace(std::string_view text);
std::string print_trace(const TickTrace &trace);

/// Same layout as traces, values sorted within each sink.
std::string print_output(const OutputTrace &output);

} // namespace flowsat
