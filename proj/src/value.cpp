#include "flowsat/value.hpp"

#include "flowsat/error.hpp"
#include "flowsat/term.hpp"

#include <charconv>
#include <ostream>

namespace flowsat {

std::strong_ordering operator<=>(const Value &a, const Value &b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  if (a.is_integer()) return a.as_integer() <=> b.as_integer();
  if (a.is_atom()) return a.as_atom().compare(b.as_atom()) <=> 0;
  const auto &x = a.as_tuple();
  const auto &y = b.as_tuple();
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    auto c = x[i] <=> y[i];
    if (c != 0) return c;
  }
  return x.size() <=> y.size();
}

Multiset to_multiset(std::span<const Value> values) {
  Multiset out;
  for (const auto &v : values) ++out[v];
  return out;
}

std::string print_value(const Value &v) {
  if (v.is_integer()) return std::to_string(v.as_integer());
  if (v.is_atom()) return v.as_atom();
  std::string out = "(tuple";
  for (const auto &item : v.as_tuple()) {
    out += ' ';
    out += print_value(item);
  }
  out += ')';
  return out;
}

std::ostream &operator<<(std::ostream &out, const Value &v) { return out << print_value(v); }

Value value_from_sexpr(const SExpr &form) {
  if (form.is_atom()) {
    const auto &text = form.atom;
    std::int64_t n = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec == std::errc() && end == text.data() + text.size()) return Value::integer(n);
    if (!is_valid_name(text))
      throw ParseError(ParseErrorKind::syntax, "invalid value '" + text + "'", form.line, form.column);
    return Value::atom(text);
  }
  if (form.items.empty() || form.items.front().is_list || form.items.front().atom != "tuple")
    throw ParseError(ParseErrorKind::syntax, "expected (tuple ...)", form.line, form.column);
  Value::Tuple items;
  for (std::size_t i = 1; i < form.items.size(); ++i) items.push_back(value_from_sexpr(form.items[i]));
  return Value::tuple(std::move(items));
}

Value parse_value(std::string_view text) { return value_from_sexpr(read_sexpr(text)); }

std::uint64_t value_fingerprint(const Value &v) {
  // FNV-1a over the canonical printing.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : print_value(v)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace flowsat
