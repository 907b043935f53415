#include "bmrep/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "bmrep/error.hpp"

namespace bmrep {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse_all() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

  Kernel kernel_all() {
    Kernel k = kernel();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return k;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw ParseError(at, msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  bool number_ahead() {
    skip();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double number() {
    skip();
    const std::size_t start = pos_;
    if (start >= s_.size()) fail("expected number");
    double v = 0.0;
    // from_chars rejects a leading '+'
    const char* first = s_.data() + (s_[start] == '+' ? start + 1 : start);
    const auto res = std::from_chars(first, s_.data() + s_.size(), v);
    if (res.ec != std::errc() || res.ptr == first) fail_at(start, "expected number");
    if (!std::isfinite(v)) fail_at(start, "number out of range");
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    return v;
  }

  int integer() {
    const std::size_t start = pos_;
    const double v = number();
    if (v != std::floor(v) || std::abs(v) > 1e6) fail_at(start, "expected integer");
    return static_cast<int>(v);
  }

  double time_arg() {
    skip();
    const std::size_t start = pos_;
    const double v = number();
    if (v < 0.0) fail_at(start, "time arguments must be nonnegative");
    return v;
  }

  std::vector<double> coeff_list() {
    expect('[');
    std::vector<double> c;
    if (!accept(']')) {
      do c.push_back(number());
      while (accept(','));
      expect(']');
    }
    return c;
  }

  Kernel kernel() {
    const std::size_t start = (skip(), pos_);
    const std::string name = identifier();
    if (name == "poly") return Kernel::polynomial(coeff_list());
    if (name == "revpoly" || name == "exppoly") {
      expect('(');
      const double p = number();
      expect(')');
      auto c = coeff_list();
      return name == "revpoly" ? Kernel::reverse_polynomial(p, std::move(c))
                               : Kernel::exp_polynomial(p, std::move(c));
    }
    fail_at(start, "unknown kernel family '" + name + "'");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    while (accept('*')) e = e * unary();
    return e;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      skip();
      const std::size_t at = pos_;
      const int n = integer();
      if (n < 0) fail_at(at, "power exponent must be a nonnegative integer");
      return base.pow(n);
    }
    return base;
  }

  Expr primary() {
    if (number_ahead()) return Expr::constant(number());
    if (accept('(')) {
      Expr e = expr();
      expect(')');
      return e;
    }
    skip();
    const std::size_t start = pos_;
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const std::string name = identifier();
    try {
      return call(name, start);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail_at(start, e.what());
    }
  }

  Expr call(const std::string& name, std::size_t start) {
    expect('(');
    Expr out;
    if (name == "W") {
      out = Expr::brownian(time_arg());
    } else if (name == "pow") {
      Expr base = expr();
      expect(',');
      skip();
      const std::size_t at = pos_;
      const int n = integer();
      if (n < 0) fail_at(at, "power exponent must be a nonnegative integer");
      out = base.pow(n);
    } else if (name == "exp") {
      out = Expr::exp(expr());
    } else if (name == "neg") {
      out = -expr();
    } else if (name == "scale") {
      const double c = number();
      expect(',');
      out = expr().scaled(c);
    } else if (name == "intdt") {
      if (identifier() != "W") fail("intdt integrates W only");
      expect(',');
      const double a = time_arg();
      expect(',');
      const double b = time_arg();
      if (a > b) fail_at(start, "integral bounds must satisfy a <= b");
      out = Expr::time_integral(a, b);
    } else if (name == "wint") {
      const Kernel k = kernel();
      expect(',');
      const double a = time_arg();
      expect(',');
      const double b = time_arg();
      if (a > b) fail_at(start, "integral bounds must satisfy a <= b");
      out = Expr::wiener_integral(k, a, b);
    } else if (name == "apply" || name == "dapply") {
      skip();
      const std::size_t at = pos_;
      const std::string fn = identifier();
      int order = 0;
      expect(',');
      if (name == "dapply") {
        order = integer();
        if (order < 0) fail_at(at, "derivative order must be nonnegative");
        expect(',');
      }
      Expr arg = expr();
      try {
        out = Expr::apply(fn, arg, order);
      } catch (const DomainError& e) {
        fail_at(at, e.what());
      }
    } else if (name == "sum" || name == "prod") {
      out = name == "sum" ? Expr() : Expr::constant(1.0);
      do {
        Expr e = expr();
        out = name == "sum" ? out + e : out * e;
      } while (accept(','));
    } else {
      fail_at(start, "unknown function '" + name + "'");
    }
    expect(')');
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

Kernel parse_kernel(std::string_view text) { return Parser(text).kernel_all(); }

}  // namespace bmrep
