#include "flowsat/interp.hpp"

#include "flowsat/diamond.hpp"
#include "flowsat/error.hpp"

#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace flowsat {

namespace {

Value salted(std::string_view salt, const Value &v) {
  return Value::tuple({Value::atom(std::string(salt)), v});
}

MapFn keyed_hash_map(std::string salt, std::uint64_t range) {
  return [salt = std::move(salt), range](const Value &v) {
    auto h = static_cast<std::int64_t>(value_fingerprint(salted(salt, v)) % range);
    if (v.is_tuple() && !v.as_tuple().empty()) return Value::tuple({v.as_tuple().front(), Value::integer(h)});
    return Value::integer(h);
  };
}

FilterFn hash_filter(std::string salt) {
  return [salt = std::move(salt)](const Value &v) { return value_fingerprint(salted(salt, v)) % 3 != 0; };
}

bool last_is_atom(const Value &v, std::string_view name) {
  return v.is_tuple() && !v.as_tuple().empty() && v.as_tuple().back().is_atom() &&
         v.as_tuple().back().as_atom() == name;
}

// Streams compiled into a DAG of stateful nodes, evaluated in creation
// order (inputs are always created before their consumers).
class Dataflow {
public:
  Dataflow(const UdfRegistry &udfs) : udfs_(udfs) {}

  std::size_t compile(const Term &t, const std::unordered_map<std::string, std::size_t> &env) {
    Node node;
    node.op = t.op();
    switch (t.op()) {
    case Op::source: {
      auto it = env.find(t.symbol());
      if (it != env.end()) return it->second;
      node.name = t.symbol();
      break;
    }
    case Op::map:
      node.map = udfs_.find_map(t.symbol());
      if (!node.map) throw EvalError("unregistered map function '" + t.symbol() + "'");
      node.input = compile(t.child(0), env);
      break;
    case Op::filter:
      node.filter = udfs_.find_filter(t.symbol());
      if (!node.filter) throw EvalError("unregistered filter function '" + t.symbol() + "'");
      node.input = compile(t.child(0), env);
      break;
    case Op::persist:
    case Op::delta:
    case Op::old:
    case Op::prev:
      node.input = compile(t.child(0), env);
      break;
    case Op::chain:
    case Op::cross:
    case Op::join:
      node.input = compile(t.child(0), env);
      node.second = compile(t.child(1), env);
      break;
    case Op::diamond:
      return compile(desugar_all(t), env);
    default:
      throw EvalError("'" + print_term(t) + "' is not an executable stream");
    }
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  void step(const std::map<std::string, Batch> &inputs) {
    for (auto &node : nodes_) evaluate(node, inputs);
  }

  const std::vector<Value> &output(std::size_t id) const { return nodes_[id].out; }

private:
  struct Node {
    Op op = Op::source;
    std::string name;
    std::size_t input = 0;
    std::size_t second = 0;
    const MapFn *map = nullptr;
    const FilterFn *filter = nullptr;
    std::vector<Value> state;
    std::vector<Value> out;
  };

  const UdfRegistry &udfs_;
  std::vector<Node> nodes_;

  static std::pair<Value, Value> split_key(const Value &v) {
    if (!v.is_tuple() || v.as_tuple().size() < 2)
      throw EvalError("join input " + print_value(v) + " is not a tuple of arity >= 2");
    const auto &items = v.as_tuple();
    if (items.size() == 2) return {items[0], items[1]};
    return {items[0], Value::tuple(Value::Tuple(items.begin() + 1, items.end()))};
  }

  void evaluate(Node &node, const std::map<std::string, Batch> &inputs) {
    std::vector<Value> out;
    switch (node.op) {
    case Op::source: {
      auto it = inputs.find(node.name);
      if (it != inputs.end()) out = it->second;
      break;
    }
    case Op::persist: {
      const auto &in = nodes_[node.input].out;
      node.state.insert(node.state.end(), in.begin(), in.end());
      out = node.state;
      break;
    }
    case Op::old: {
      const auto &in = nodes_[node.input].out;
      out = node.state;
      node.state.insert(node.state.end(), in.begin(), in.end());
      break;
    }
    case Op::prev:
      out = std::move(node.state);
      node.state = nodes_[node.input].out;
      break;
    case Op::delta: {
      const auto &in = nodes_[node.input].out;
      auto previous = to_multiset(node.state);
      for (const auto &v : in) {
        auto it = previous.find(v);
        if (it != previous.end() && it->second > 0) {
          --it->second;
          continue;
        }
        out.push_back(v);
      }
      node.state = in;
      break;
    }
    case Op::chain: {
      const auto &a = nodes_[node.input].out;
      const auto &b = nodes_[node.second].out;
      out.reserve(a.size() + b.size());
      out.insert(out.end(), a.begin(), a.end());
      out.insert(out.end(), b.begin(), b.end());
      break;
    }
    case Op::cross: {
      const auto &a = nodes_[node.input].out;
      const auto &b = nodes_[node.second].out;
      out.reserve(a.size() * b.size());
      for (const auto &x : a)
        for (const auto &y : b) out.push_back(Value::tuple({x, y}));
      break;
    }
    case Op::join: {
      const auto &a = nodes_[node.input].out;
      const auto &b = nodes_[node.second].out;
      std::vector<std::pair<Value, Value>> right;
      right.reserve(b.size());
      for (const auto &y : b) right.push_back(split_key(y));
      for (const auto &x : a) {
        auto [key, lhs] = split_key(x);
        for (const auto &[k, rhs] : right)
          if (k == key) out.push_back(Value::tuple({key, lhs, rhs}));
      }
      break;
    }
    case Op::map:
      for (const auto &v : nodes_[node.input].out) out.push_back((*node.map)(v));
      break;
    case Op::filter:
      for (const auto &v : nodes_[node.input].out)
        if ((*node.filter)(v)) out.push_back(v);
      break;
    default:
      break;
    }
    node.out = std::move(out);
  }
};

std::string print_values(std::vector<Value> values, bool sorted) {
  if (sorted) std::sort(values.begin(), values.end());
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += print_value(values[i]);
  }
  return out + "]";
}

} // namespace

void UdfRegistry::add_map(std::string name, MapFn fn) { maps_.insert_or_assign(std::move(name), std::move(fn)); }

void UdfRegistry::add_filter(std::string name, FilterFn fn) {
  filters_.insert_or_assign(std::move(name), std::move(fn));
}

const MapFn *UdfRegistry::find_map(std::string_view name) const {
  auto it = maps_.find(name);
  return it == maps_.end() ? nullptr : &it->second;
}

const FilterFn *UdfRegistry::find_filter(std::string_view name) const {
  auto it = filters_.find(name);
  return it == filters_.end() ? nullptr : &it->second;
}

std::vector<std::string> UdfRegistry::map_names() const {
  std::vector<std::string> names;
  for (const auto &[name, fn] : maps_) names.push_back(name);
  return names;
}

std::vector<std::string> UdfRegistry::filter_names() const {
  std::vector<std::string> names;
  for (const auto &[name, fn] : filters_) names.push_back(name);
  return names;
}

UdfRegistry UdfRegistry::standard() {
  UdfRegistry udfs;
  udfs.add_map("with_school", [](const Value &v) {
    bool even = v.is_integer() ? v.as_integer() % 2 == 0 : value_fingerprint(v) % 2 == 0;
    return Value::tuple({v, Value::atom(even ? "berkeley" : "stanford")});
  });
  udfs.add_filter("berkeley", [](const Value &v) { return last_is_atom(v, "berkeley"); });
  udfs.add_filter("stanford", [](const Value &v) { return last_is_atom(v, "stanford"); });
  udfs.add_map("f", keyed_hash_map("f", 5));
  udfs.add_map("g", keyed_hash_map("g", 3));
  udfs.add_map("h", keyed_hash_map("h", 4));
  udfs.add_filter("p", hash_filter("p"));
  udfs.add_filter("q", hash_filter("q"));
  udfs.add_filter("r", hash_filter("r"));
  return udfs;
}

OutputTrace run(const ProgramFile &program, const TickTrace &inputs, const UdfRegistry &udfs) {
  Dataflow flow(udfs);
  std::unordered_map<std::string, std::size_t> env;
  for (const auto &d : program.defs) env.insert_or_assign(d.name, flow.compile(d.body, env));
  std::vector<std::pair<std::string, std::size_t>> sinks;
  for (const auto &s : program.sinks) sinks.emplace_back(s.name, flow.compile(s.body, env));

  OutputTrace result;
  result.ticks.reserve(inputs.size());
  for (const auto &tick : inputs.ticks) {
    flow.step(tick);
    auto &record = result.ticks.emplace_back();
    for (const auto &[name, id] : sinks) record[name] = flow.output(id);
  }
  return result;
}

std::vector<std::vector<Value>> run_term(const Term &term, const TickTrace &inputs, const UdfRegistry &udfs) {
  ProgramFile program;
  program.sinks.push_back({"out", term});
  auto trace = run(program, inputs, udfs);
  std::vector<std::vector<Value>> out;
  for (auto &tick : trace.ticks) out.push_back(std::move(tick["out"]));
  return out;
}

std::string Divergence::describe() const {
  std::ostringstream out;
  out << "tick " << tick << ", sink " << sink << ": expected " << print_values(expected, true) << ", got "
      << print_values(actual, true);
  return out.str();
}

Equivalence compare_outputs(const OutputTrace &a, const OutputTrace &b, CompareMode mode) {
  std::size_t ticks = std::max(a.ticks.size(), b.ticks.size());
  static const std::map<std::string, std::vector<Value>> empty;
  for (std::size_t t = 0; t < ticks; ++t) {
    const auto &x = t < a.ticks.size() ? a.ticks[t] : empty;
    const auto &y = t < b.ticks.size() ? b.ticks[t] : empty;
    std::set<std::string> names;
    for (const auto &[n, v] : x) names.insert(n);
    for (const auto &[n, v] : y) names.insert(n);
    for (const auto &name : names) {
      static const std::vector<Value> none;
      auto ix = x.find(name);
      auto iy = y.find(name);
      const auto &vx = ix == x.end() ? none : ix->second;
      const auto &vy = iy == y.end() ? none : iy->second;
      bool same = mode == CompareMode::ordered ? vx == vy : to_multiset(vx) == to_multiset(vy);
      if (!same) return {false, Divergence{t + 1, name, vx, vy}};
    }
  }
  return {};
}

Equivalence equivalent(const ProgramFile &a, const ProgramFile &b, const TickTrace &inputs,
                       const UdfRegistry &udfs, CompareMode mode) {
  auto names_a = a.sink_names();
  auto names_b = b.sink_names();
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b) throw Error("programs have different sinks");
  return compare_outputs(run(a, inputs, udfs), run(b, inputs, udfs), mode);
}

Equivalence equivalent_terms(const Term &a, const Term &b, const TickTrace &inputs, const UdfRegistry &udfs,
                             CompareMode mode) {
  ProgramFile pa;
  pa.sinks.push_back({"out", a});
  ProgramFile pb;
  pb.sinks.push_back({"out", b});
  return equivalent(pa, pb, inputs, udfs, mode);
}

TickTrace random_trace(std::span<const std::string> sources, std::size_t ticks, std::uint64_t seed,
                       std::size_t batch_max, ValueShape shape) {
  // Raw engine output only: distribution objects differ between standard
  // libraries, and traces must be reproducible from the seed everywhere.
  std::mt19937_64 rng(seed);
  TickTrace trace;
  trace.ticks.resize(ticks);
  for (auto &tick : trace.ticks) {
    for (const auto &name : sources) {
      auto count = static_cast<std::size_t>(rng() % (batch_max + 1));
      auto &batch = tick[name];
      for (std::size_t i = 0; i < count; ++i) {
        if (shape == ValueShape::keyed) {
          auto key = static_cast<std::int64_t>(rng() % 4);
          auto payload = static_cast<std::int64_t>(rng() % 3);
          batch.push_back(Value::tuple({Value::integer(key), Value::integer(payload)}));
        } else {
          batch.push_back(Value::integer(static_cast<std::int64_t>(rng() % 5)));
        }
      }
    }
  }
  return trace;
}

TickTrace parse_trace(std::string_view text) {
  TickTrace trace;
  for (const auto &form : read_sexprs(text)) {
    if (!form.is_list || form.items.empty() || form.items.front().is_list || form.items.front().atom != "tick")
      throw ParseError(ParseErrorKind::syntax, "expected (tick ...)", form.line, form.column);
    auto &tick = trace.ticks.emplace_back();
    for (std::size_t i = 1; i < form.items.size(); ++i) {
      const auto &entry = form.items[i];
      if (!entry.is_list || entry.items.empty() || entry.items.front().is_list ||
          !is_valid_name(entry.items.front().atom))
        throw ParseError(ParseErrorKind::syntax, "expected (name value...)", entry.line, entry.column);
      auto &batch = tick[entry.items.front().atom];
      for (std::size_t j = 1; j < entry.items.size(); ++j) batch.push_back(value_from_sexpr(entry.items[j]));
    }
  }
  return trace;
}

namespace {

template <typename Ticks> std::string print_ticks(const Ticks &ticks, bool sorted) {
  std::string out;
  for (const auto &tick : ticks) {
    out += "(tick";
    for (const auto &[name, values] : tick) {
      out += " (" + name;
      std::vector<Value> ordered(values.begin(), values.end());
      if (sorted) std::sort(ordered.begin(), ordered.end());
      for (const auto &v : ordered) out += " " + print_value(v);
      out += ")";
    }
    out += ")\n";
  }
  return out;
}

} // namespace

std::string print_trace(const TickTrace &trace) { return print_ticks(trace.ticks, false); }

std::string print_output(const OutputTrace &output) { return print_ticks(output.ticks, true); }

} // namespace flowsat
