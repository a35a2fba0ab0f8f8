#include "fracdecay/expreval.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace fracdecay::expreval {

struct Expr::Node {
  enum class Kind { Constant, Variable, Unary, Binary } kind;
  double value = 0.0;
  char op = 0;
  double (*fn)(double) = nullptr;  // null in a unary node means negation
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double x) const {
    switch (kind) {
      case Kind::Constant:
        return value;
      case Kind::Variable:
        return x;
      case Kind::Unary:
        return fn ? fn(lhs->eval(x)) : -lhs->eval(x);
      case Kind::Binary: {
        const double a = lhs->eval(x), b = rhs->eval(x);
        switch (op) {
          case '+':
            return a + b;
          case '-':
            return a - b;
          case '*':
            return a * b;
          case '/':
            return a / b;
          case '^':
            return std::pow(a, b);
        }
        return 0.0;
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr constant(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Node::Kind::Constant;
  n->value = v;
  return n;
}

NodePtr binary(char op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Node::Kind::Binary;
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

double fn_sin(double x) { return std::sin(x); }
double fn_cos(double x) { return std::cos(x); }
double fn_tan(double x) { return std::tan(x); }
double fn_exp(double x) { return std::exp(x); }
double fn_log(double x) { return std::log(x); }
double fn_sqrt(double x) { return std::sqrt(x); }
double fn_abs(double x) { return std::fabs(x); }
double fn_tanh(double x) { return std::tanh(x); }
double fn_sinh(double x) { return std::sinh(x); }
double fn_cosh(double x) { return std::cosh(x); }

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    auto node = sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ExprError("unexpected trailing input at '" + text_.substr(pos_) +
                      "'");
    return node;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    auto node = product();
    for (;;) {
      if (consume('+'))
        node = binary('+', node, product());
      else if (consume('-'))
        node = binary('-', node, product());
      else
        return node;
    }
  }

  NodePtr product() {
    auto node = power();
    for (;;) {
      if (consume('*'))
        node = binary('*', node, power());
      else if (consume('/'))
        node = binary('/', node, power());
      else
        return node;
    }
  }

  NodePtr power() {
    auto base = unary();
    if (consume('^')) return binary('^', base, power());  // right-assoc
    return base;
  }

  NodePtr unary() {
    if (consume('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::Unary;
      n->lhs = unary();
      return n;
    }
    (void)consume('+');
    return atom();
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ExprError("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto node = sum();
      if (!consume(')')) throw ExprError("missing closing parenthesis");
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text_.substr(pos_), &used);
      } catch (const std::exception&) {
        throw ExprError("malformed number at '" + text_.substr(pos_) + "'");
      }
      pos_ += used;
      return constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[end])))
        ++end;
      const std::string name = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "x") {
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Node::Kind::Variable;
        return n;
      }
      if (name == "pi") return constant(3.14159265358979323846);
      if (name == "e") return constant(2.71828182845904523536);
      static const std::pair<const char*, double (*)(double)> fns[] = {
          {"sin", fn_sin},   {"cos", fn_cos},   {"tan", fn_tan},
          {"exp", fn_exp},   {"log", fn_log},   {"sqrt", fn_sqrt},
          {"abs", fn_abs},   {"tanh", fn_tanh}, {"sinh", fn_sinh},
          {"cosh", fn_cosh},
      };
      for (const auto& [fname, fptr] : fns) {
        if (name == fname) {
          if (!consume('('))
            throw ExprError("function '" + name + "' needs parentheses");
          auto arg = sum();
          if (!consume(')')) throw ExprError("missing closing parenthesis");
          auto n = std::make_shared<Expr::Node>();
          n->kind = Expr::Node::Kind::Unary;
          n->fn = fptr;
          n->lhs = std::move(arg);
          return n;
        }
      }
      throw ExprError("unknown identifier '" + name + "'");
    }
    throw ExprError(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr(const std::string& text) : root_(Parser(text).parse()) {}

double Expr::operator()(double x) const { return root_->eval(x); }

double eval_expr(const std::string& text, double x) { return Expr(text)(x); }

space::Field eval_on_grid(const std::string& text, const space::Grid1D& grid) {
  Expr expr(text);
  space::Field out(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) out[i] = expr(grid.x(i));
  return out;
}

}  // namespace fracdecay::expreval
