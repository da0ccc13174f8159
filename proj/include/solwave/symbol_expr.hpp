#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>

#include "solwave/errors.hpp"
#include "solwave/symbol.hpp"

namespace solwave {

/// AST for the tiny symbol expression language.
///
/// Grammar (k is the only free variable; ^ takes integer exponents):
///   expr   := term { ('+' | '-') term }
///   term   := unary { ('*' | '/') unary }
///   unary  := '-' unary | power
///   power  := primary [ '^' [ '-' ] integer ]
///   primary:= number | 'k' | func '(' expr ')' | '(' expr ')'
///   func   := sqrt | tanh | cosh | sech | abs
struct Expr {
  enum class Kind { Number, Variable, Add, Sub, Mul, Div, Neg, Pow, Call };
  enum class Func { Sqrt, Tanh, Cosh, Sech, Abs };

  Kind kind;
  double number = 0.0;  // Kind::Number
  int exponent = 0;     // Kind::Pow
  Func func = Func::Sqrt;
  std::shared_ptr<const Expr> lhs, rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

struct SymbolExpr {
  ExprPtr ast;
  std::string source_text;
};

namespace expr_detail {

inline ExprPtr make_number(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Number;
  e->number = v;
  return e;
}

inline ExprPtr make_variable() {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Variable;
  return e;
}

inline ExprPtr make_binary(Expr::Kind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

inline ExprPtr make_neg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Neg;
  e->lhs = std::move(a);
  return e;
}

inline ExprPtr make_pow(ExprPtr base, int n) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Pow;
  e->lhs = std::move(base);
  e->exponent = n;
  return e;
}

inline ExprPtr make_call(Expr::Func f, ExprPtr arg) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->func = f;
  e->lhs = std::move(arg);
  return e;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  ExprPtr run() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(pos_, "end of input");
    return e;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos_, what);
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (accept('+')) e = make_binary(Expr::Kind::Add, e, parse_term());
      else if (accept('-')) e = make_binary(Expr::Kind::Sub, e, parse_term());
      else return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (accept('*')) e = make_binary(Expr::Kind::Mul, e, parse_unary());
      else if (accept('/')) e = make_binary(Expr::Kind::Div, e, parse_unary());
      else return e;
    }
  }

  ExprPtr parse_unary() {
    if (accept('-')) return make_neg(parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) {
      const bool neg = accept('-');
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == start) throw ParseError(pos_, "integer exponent");
      const int n = std::atoi(text_.substr(start, pos_ - start).c_str());
      return make_pow(std::move(base), neg ? -n : n);
    }
    return base;
  }

  ExprPtr parse_primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    throw ParseError(pos_, "expression");
  }

  ExprPtr parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(pos_, "number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_number(v);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "k") return make_variable();
    Expr::Func f;
    if (name == "sqrt") f = Expr::Func::Sqrt;
    else if (name == "tanh") f = Expr::Func::Tanh;
    else if (name == "cosh") f = Expr::Func::Cosh;
    else if (name == "sech") f = Expr::Func::Sech;
    else if (name == "abs") f = Expr::Func::Abs;
    else throw UnknownIdentifier(name);
    expect('(', "'(' after function name");
    ExprPtr arg = parse_expr();
    expect(')', "')'");
    return make_call(f, std::move(arg));
  }
};

inline const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::Sqrt: return "sqrt";
    case Expr::Func::Tanh: return "tanh";
    case Expr::Func::Cosh: return "cosh";
    case Expr::Func::Sech: return "sech";
    case Expr::Func::Abs: return "abs";
  }
  return "?";
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Canonical fully-parenthesized rendering; stable under reparsing.
inline void print_to(const ExprPtr& e, std::string& out) {
  switch (e->kind) {
    case Expr::Kind::Number:
      out += format_number(e->number);
      return;
    case Expr::Kind::Variable:
      out += 'k';
      return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      const char op = e->kind == Expr::Kind::Add   ? '+'
                      : e->kind == Expr::Kind::Sub ? '-'
                      : e->kind == Expr::Kind::Mul ? '*'
                                                   : '/';
      out += '(';
      print_to(e->lhs, out);
      out += op;
      print_to(e->rhs, out);
      out += ')';
      return;
    }
    case Expr::Kind::Neg:
      out += "(-";
      print_to(e->lhs, out);
      out += ')';
      return;
    case Expr::Kind::Pow:
      out += '(';
      print_to(e->lhs, out);
      out += '^';
      out += std::to_string(e->exponent);
      out += ')';
      return;
    case Expr::Kind::Call:
      out += func_name(e->func);
      out += '(';
      print_to(e->lhs, out);
      out += ')';
      return;
  }
}

/// Plain recursive evaluation at a point t >= 0 (no limit handling).
inline double eval_plain(const Expr& e, double t) {
  switch (e.kind) {
    case Expr::Kind::Number: return e.number;
    case Expr::Kind::Variable: return t;
    case Expr::Kind::Add: return eval_plain(*e.lhs, t) + eval_plain(*e.rhs, t);
    case Expr::Kind::Sub: return eval_plain(*e.lhs, t) - eval_plain(*e.rhs, t);
    case Expr::Kind::Mul: return eval_plain(*e.lhs, t) * eval_plain(*e.rhs, t);
    case Expr::Kind::Div: return eval_plain(*e.lhs, t) / eval_plain(*e.rhs, t);
    case Expr::Kind::Neg: return -eval_plain(*e.lhs, t);
    case Expr::Kind::Pow: {
      const double b = eval_plain(*e.lhs, t);
      return std::pow(b, static_cast<double>(e.exponent));
    }
    case Expr::Kind::Call: {
      const double a = eval_plain(*e.lhs, t);
      switch (e.func) {
        case Expr::Func::Sqrt: return std::sqrt(a);
        case Expr::Func::Tanh: return std::tanh(a);
        case Expr::Func::Cosh: return std::cosh(a);
        case Expr::Func::Sech: return 1.0 / std::cosh(a);
        case Expr::Func::Abs: return std::abs(a);
      }
      return 0.0;
    }
  }
  return 0.0;
}

/// Guarded evaluation: division by an exact zero near the origin is resolved
/// as a one-sided limit when the numerator vanishes too; genuine poles and
/// sqrt of negatives raise SymbolSingular.
inline double eval_guarded(const Expr& e, double t) {
  switch (e.kind) {
    case Expr::Kind::Number: return e.number;
    case Expr::Kind::Variable: return t;
    case Expr::Kind::Add: return eval_guarded(*e.lhs, t) + eval_guarded(*e.rhs, t);
    case Expr::Kind::Sub: return eval_guarded(*e.lhs, t) - eval_guarded(*e.rhs, t);
    case Expr::Kind::Mul: return eval_guarded(*e.lhs, t) * eval_guarded(*e.rhs, t);
    case Expr::Kind::Div: {
      const double n = eval_guarded(*e.lhs, t);
      const double d = eval_guarded(*e.rhs, t);
      if (d != 0.0) return n / d;
      if (t < 1e-8 && std::abs(n) < 1e-12) {
        // 0/0 close to the origin: ratio at two offsets plus one Richardson
        // step removes the O(h^2) term of even expansions
        const double h = 1e-5;
        const double r1 = eval_guarded(*e.lhs, h) / eval_guarded(*e.rhs, h);
        const double r2 =
            eval_guarded(*e.lhs, h / 2) / eval_guarded(*e.rhs, h / 2);
        if (!std::isfinite(r1) || !std::isfinite(r2) ||
            std::abs(r2 - r1) > 1e-6 * std::max(1.0, std::abs(r2))) {
          throw SymbolSingular(t, "0/0 limit did not settle");
        }
        return (4.0 * r2 - r1) / 3.0;
      }
      throw SymbolSingular(t, "division by zero");
    }
    case Expr::Kind::Neg: return -eval_guarded(*e.lhs, t);
    case Expr::Kind::Pow: {
      const double b = eval_guarded(*e.lhs, t);
      if (e.exponent < 0 && b == 0.0)
        throw SymbolSingular(t, "negative power of zero");
      return std::pow(b, static_cast<double>(e.exponent));
    }
    case Expr::Kind::Call: {
      const double a = eval_guarded(*e.lhs, t);
      switch (e.func) {
        case Expr::Func::Sqrt:
          if (a < 0.0) throw SymbolSingular(t, "sqrt of a negative value");
          return std::sqrt(a);
        case Expr::Func::Tanh: return std::tanh(a);
        case Expr::Func::Cosh: return std::cosh(a);
        case Expr::Func::Sech: return 1.0 / std::cosh(a);
        case Expr::Func::Abs: return std::abs(a);
      }
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace expr_detail

inline SymbolExpr parse_symbol(const std::string& text) {
  if (text.empty()) throw ParseError(0, "nonempty expression");
  expr_detail::Parser p(text);
  return SymbolExpr{p.run(), text};
}

inline std::string print_symbol(const SymbolExpr& expr) {
  std::string out;
  expr_detail::print_to(expr.ast, out);
  return out;
}

inline bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Number: return a->number == b->number;
    case Expr::Kind::Variable: return true;
    case Expr::Kind::Neg: return ast_equal(a->lhs, b->lhs);
    case Expr::Kind::Pow:
      return a->exponent == b->exponent && ast_equal(a->lhs, b->lhs);
    case Expr::Kind::Call:
      return a->func == b->func && ast_equal(a->lhs, b->lhs);
    default:
      return ast_equal(a->lhs, b->lhs) && ast_equal(a->rhs, b->rhs);
  }
}

/// Wrap the AST as an even multiplier symbol (evaluated at |k|).
inline MultiplierSymbol compile_symbol(const SymbolExpr& expr) {
  ExprPtr ast = expr.ast;
  return MultiplierSymbol(
      [ast](double t) { return expr_detail::eval_guarded(*ast, t); });
}

}  // namespace solwave
