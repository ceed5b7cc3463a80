#pragma once

#include "flowsat/sexpr.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace flowsat {

/// A stream element: integer, symbol atom, or tuple of values.
class Value {
public:
  using Tuple = std::vector<Value>;

  Value() : data_(std::int64_t{0}) {}
  static Value integer(std::int64_t n) { return Value(n); }
  static Value atom(std::string name) { return Value(Atom{std::move(name)}); }
  static Value tuple(Tuple items) { return Value(std::move(items)); }

  bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_atom() const { return std::holds_alternative<Atom>(data_); }
  bool is_tuple() const { return std::holds_alternative<Tuple>(data_); }

  std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
  const std::string &as_atom() const { return std::get<Atom>(data_).name; }
  const Tuple &as_tuple() const { return std::get<Tuple>(data_); }

  /// Integers < atoms < tuples; within a kind, natural/lexicographic order.
  friend std::strong_ordering operator<=>(const Value &a, const Value &b);
  friend bool operator==(const Value &a, const Value &b) { return (a <=> b) == 0; }

private:
  struct Atom {
    std::string name;
  };
  template <typename T> explicit Value(T v) : data_(std::move(v)) {}

  std::variant<std::int64_t, Atom, Tuple> data_;
};

using Multiset = std::map<Value, std::size_t>;

Multiset to_multiset(std::span<const Value> values);

std::string print_value(const Value &v);
std::ostream &operator<<(std::ostream &out, const Value &v);

/// Integer, symbol atom, or `(tuple v...)`.
Value value_from_sexpr(const SExpr &form);
Value parse_value(std::string_view text);

/// Stable across platforms and runs; used by the built-in functions.
std::uint64_t value_fingerprint(const Value &v);

} // namespace flowsat
