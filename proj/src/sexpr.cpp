#include "flowsat/sexpr.hpp"

#include "flowsat/error.hpp"

#include <cctype>
#include <sstream>

namespace flowsat {

namespace {

std::string format_message(const std::string &message, int line, int column) {
  if (line <= 0) return message;
  std::ostringstream out;
  out << line << ":" << column << ": " << message;
  return out.str();
}

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> forms;
    skip_blank();
    while (pos_ < text_.size()) {
      forms.push_back(read_form());
      skip_blank();
    }
    return forms;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read_form() {
    SExpr form;
    form.line = line_;
    form.column = column_;
    char c = text_[pos_];
    if (c == ')') throw ParseError(ParseErrorKind::syntax, "unexpected ')'", line_, column_);
    if (c == '(') {
      form.is_list = true;
      advance();
      for (;;) {
        skip_blank();
        if (pos_ >= text_.size())
          throw ParseError(ParseErrorKind::syntax, "unterminated list", form.line, form.column);
        if (text_[pos_] == ')') {
          advance();
          return form;
        }
        form.items.push_back(read_form());
      }
    }
    while (pos_ < text_.size()) {
      c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      form.atom.push_back(c);
      advance();
    }
    return form;
  }
};

} // namespace

ParseError::ParseError(ParseErrorKind kind, const std::string &message, int line, int column)
    : Error(format_message(message, line, column)), kind_(kind), line_(line), column_(column) {}

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).read_all(); }

SExpr read_sexpr(std::string_view text) {
  auto forms = read_sexprs(text);
  if (forms.empty()) throw ParseError(ParseErrorKind::syntax, "empty input", 1, 1);
  if (forms.size() > 1)
    throw ParseError(ParseErrorKind::syntax, "expected a single form", forms[1].line, forms[1].column);
  return std::move(forms.front());
}

} // namespace flowsat
