#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "fracdecay/space.hpp"

namespace fracdecay::expreval {

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Compiled arithmetic expression in the variable x.
/// Grammar: + - * / ^ (right-assoc), unary minus, parentheses, constants
/// pi and e, functions sin cos tan exp log sqrt abs tanh sinh cosh.
class Expr {
 public:
  explicit Expr(const std::string& text);
  double operator()(double x) const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

double eval_expr(const std::string& text, double x);
space::Field eval_on_grid(const std::string& text, const space::Grid1D& grid);

}  // namespace fracdecay::expreval
