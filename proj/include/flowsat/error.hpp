#pragma once

#include <stdexcept>
#include <string>

namespace flowsat {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  syntax,
  unknown_operator,
  arity,
  bad_name,
  duplicate,
  cyclic_reference,
  undefined_reference,
  hole_placement,
};

/// Raised for malformed input text. Carries the 1-based position of the
/// offending form (0 when the error is not tied to a location).
class ParseError : public Error {
public:
  ParseError(ParseErrorKind kind, const std::string &message, int line = 0, int column = 0);

  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

private:
  ParseErrorKind kind_;
  int line_;
  int column_;
};

/// Raised by the interpreter when a program cannot be executed.
class EvalError : public Error {
public:
  using Error::Error;
};

} // namespace flowsat
