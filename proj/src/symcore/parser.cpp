#include <cctype>

#include "repargen/expression.hpp"

namespace repargen {

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const NameResolver& resolve, int line, int offset)
      : s_(text), resolve_(resolve), line_(line), offset_(offset) {}

  Expression parse() {
    Expression e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, column()); }
  int column() const { return offset_ + static_cast<int>(pos_) + 1; }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expression term() {
    Expression e = unary();
    for (;;) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }

  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expression power() {
    Expression base = primary();
    skip();
    if (!accept('^')) return base;
    int col = column();
    Expression ex = unary();
    auto q = ex.constant_value();
    if (!q) throw ParseError("exponent must be a constant", line_, col);
    return base.pow(*q);
  }

  Expression primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      int col = column();
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (resolve_) return resolve_(name, col);
      return Expression::symbol(name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expression number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    try {
      return Expression(parse_rational(s_.substr(start, pos_ - start)));
    } catch (const std::invalid_argument&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  std::string_view s_;
  const NameResolver& resolve_;
  int line_, offset_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text, const NameResolver& resolve, int line, int column_offset) {
  return Parser(text, resolve, line, column_offset).parse();
}

}  // namespace repargen
