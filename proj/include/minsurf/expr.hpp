#ifndef MINSURF_EXPR_HPP
#define MINSURF_EXPR_HPP

// Symbolic expressions in one variable `r`, used for custom warps and
// extrinsic profiles in scenario files. Supports + - * / ^, pow(a, b), exp,
// ln (alias log), sinh, cosh, tanh, sin, cos, sqrt, the constants pi and e,
// and exact symbolic differentiation.

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "minsurf/errors.hpp"

namespace minsurf {

class Expression {
 public:
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Ln, Sinh, Cosh, Tanh, Sin, Cos, Sqrt };

  Expression() : node_(make_const(0.0)) {}

  static Expression constant(double c) { return Expression(make_const(c)); }
  static Expression variable() { return Expression(std::make_shared<const Node>(Node{Op::Var, 0.0, {}, {}})); }

  /// Parses `text`. `line` is only used to locate errors inside a larger file;
  /// columns are 1-based offsets into `text` plus `column_offset`.
  static Expression parse(std::string_view text, int line = 1, int column_offset = 0);

  double operator()(double r) const { return eval(*node_, r); }

  Expression derivative() const { return Expression(diff(node_)); }

  bool is_constant() const { return node_->op == Op::Const; }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    Op op;
    double value;
    NodePtr a;
    NodePtr b;
  };

  explicit Expression(NodePtr n) : node_(std::move(n)) {}

  static NodePtr make_const(double c) { return std::make_shared<const Node>(Node{Op::Const, c, {}, {}}); }

  static bool is_const(const NodePtr& n, double c) { return n->op == Op::Const && n->value == c; }

  static NodePtr unary(Op op, NodePtr a) {
    if (a->op == Op::Const) {
      return make_const(eval(Node{op, 0.0, a, {}}, 0.0));
    }
    if (op == Op::Neg && a->op == Op::Neg) return a->a;
    return std::make_shared<const Node>(Node{op, 0.0, std::move(a), {}});
  }

  static NodePtr binary(Op op, NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) {
      return make_const(eval(Node{op, 0.0, a, b}, 0.0));
    }
    switch (op) {
      case Op::Add:
        if (is_const(a, 0.0)) return b;
        if (is_const(b, 0.0)) return a;
        break;
      case Op::Sub:
        if (is_const(b, 0.0)) return a;
        if (is_const(a, 0.0)) return unary(Op::Neg, b);
        break;
      case Op::Mul:
        if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
        if (is_const(a, 1.0)) return b;
        if (is_const(b, 1.0)) return a;
        break;
      case Op::Div:
        if (is_const(a, 0.0)) return make_const(0.0);
        if (is_const(b, 1.0)) return a;
        break;
      case Op::Pow:
        if (is_const(b, 1.0)) return a;
        if (is_const(b, 0.0)) return make_const(1.0);
        break;
      default:
        break;
    }
    return std::make_shared<const Node>(Node{op, 0.0, std::move(a), std::move(b)});
  }

  static double eval(const Node& n, double r) {
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var: return r;
      case Op::Neg: return -eval(*n.a, r);
      case Op::Add: return eval(*n.a, r) + eval(*n.b, r);
      case Op::Sub: return eval(*n.a, r) - eval(*n.b, r);
      case Op::Mul: return eval(*n.a, r) * eval(*n.b, r);
      case Op::Div: return eval(*n.a, r) / eval(*n.b, r);
      case Op::Pow: {
        const double e = eval(*n.b, r);
        const double base = eval(*n.a, r);
        if (e == 2.0) return base * base;
        return std::pow(base, e);
      }
      case Op::Exp: return std::exp(eval(*n.a, r));
      case Op::Ln: return std::log(eval(*n.a, r));
      case Op::Sinh: return std::sinh(eval(*n.a, r));
      case Op::Cosh: return std::cosh(eval(*n.a, r));
      case Op::Tanh: return std::tanh(eval(*n.a, r));
      case Op::Sin: return std::sin(eval(*n.a, r));
      case Op::Cos: return std::cos(eval(*n.a, r));
      case Op::Sqrt: return std::sqrt(eval(*n.a, r));
    }
    return 0.0;
  }

  static NodePtr diff(const NodePtr& n) {
    const auto& a = n->a;
    const auto& b = n->b;
    switch (n->op) {
      case Op::Const: return make_const(0.0);
      case Op::Var: return make_const(1.0);
      case Op::Neg: return unary(Op::Neg, diff(a));
      case Op::Add: return binary(Op::Add, diff(a), diff(b));
      case Op::Sub: return binary(Op::Sub, diff(a), diff(b));
      case Op::Mul:
        return binary(Op::Add, binary(Op::Mul, diff(a), b), binary(Op::Mul, a, diff(b)));
      case Op::Div:
        return binary(Op::Div,
                      binary(Op::Sub, binary(Op::Mul, diff(a), b), binary(Op::Mul, a, diff(b))),
                      binary(Op::Pow, b, make_const(2.0)));
      case Op::Pow: {
        if (b->op == Op::Const) {
          // d(a^c) = c a^(c-1) a'
          return binary(Op::Mul, binary(Op::Mul, b, binary(Op::Pow, a, make_const(b->value - 1.0))),
                        diff(a));
        }
        // d(a^b) = a^b (b' ln a + b a'/a)
        return binary(Op::Mul, n,
                      binary(Op::Add, binary(Op::Mul, diff(b), unary(Op::Ln, a)),
                             binary(Op::Div, binary(Op::Mul, b, diff(a)), a)));
      }
      case Op::Exp: return binary(Op::Mul, n, diff(a));
      case Op::Ln: return binary(Op::Div, diff(a), a);
      case Op::Sinh: return binary(Op::Mul, unary(Op::Cosh, a), diff(a));
      case Op::Cosh: return binary(Op::Mul, unary(Op::Sinh, a), diff(a));
      case Op::Tanh:
        return binary(Op::Mul,
                      binary(Op::Sub, make_const(1.0), binary(Op::Pow, n, make_const(2.0))), diff(a));
      case Op::Sin: return binary(Op::Mul, unary(Op::Cos, a), diff(a));
      case Op::Cos: return unary(Op::Neg, binary(Op::Mul, unary(Op::Sin, a), diff(a)));
      case Op::Sqrt: return binary(Op::Div, diff(a), binary(Op::Mul, make_const(2.0), n));
    }
    return make_const(0.0);
  }

  class Parser;

  NodePtr node_;
};

class Expression::Parser {
 public:
  Parser(std::string_view text, int line, int column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  NodePtr parse_all() {
    auto n = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression: " + msg, line_, offset_ + static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // U+2212 MINUS SIGN is accepted as '-'.
  bool at_minus() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '-') return true;
    return text_.substr(pos_, 3) == "\xE2\x88\x92";
  }
  void eat_minus() { pos_ += text_[pos_] == '-' ? 1 : 3; }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      if (eat('+')) {
        lhs = binary(Op::Add, lhs, parse_product());
      } else if (at_minus()) {
        eat_minus();
        lhs = binary(Op::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      if (eat('*')) {
        lhs = binary(Op::Mul, lhs, parse_unary());
      } else if (eat('/')) {
        lhs = binary(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (at_minus()) {
      eat_minus();
      return unary(Op::Neg, parse_unary());
    }
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (eat('^')) return binary(Op::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const auto start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      if (name == "r") return std::make_shared<const Node>(Node{Op::Var, 0.0, {}, {}});
      if (name == "pi") return make_const(std::acos(-1.0));
      if (name == "e") return make_const(std::exp(1.0));
      if (!eat('(')) {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      auto arg = parse_sum();
      if (name == "pow") {
        if (!eat(',')) fail("pow expects two arguments");
        auto ex = parse_sum();
        if (!eat(')')) fail("expected ')'");
        return binary(Op::Pow, arg, ex);
      }
      if (!eat(')')) fail("expected ')'");
      static constexpr std::pair<std::string_view, Op> kFuncs[] = {
          {"exp", Op::Exp},   {"ln", Op::Ln},   {"log", Op::Ln}, {"sinh", Op::Sinh},
          {"cosh", Op::Cosh}, {"tanh", Op::Tanh}, {"sin", Op::Sin}, {"cos", Op::Cos},
          {"sqrt", Op::Sqrt}};
      for (const auto& [fname, op] : kFuncs) {
        if (fname == name) return unary(op, arg);
      }
      pos_ = start;
      fail("unknown function '" + name + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return make_const(v);
  }

  std::string_view text_;
  int line_;
  int offset_;
  std::size_t pos_ = 0;
};

inline Expression Expression::parse(std::string_view text, int line, int column_offset) {
  Parser p(text, line, column_offset);
  return Expression(p.parse_all());
}

}  // namespace minsurf

#endif  // MINSURF_EXPR_HPP
