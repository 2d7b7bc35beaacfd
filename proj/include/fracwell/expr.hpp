#pragma once

#include <memory>
#include <string>

namespace fracwell {

// Small arithmetic expression in the variables x and y.
//
// Grammar: numbers, x, y, pi, + - * / ^ (right-assoc), unary minus,
// parentheses and the calls abs, min, max, exp, log, sqrt, sin, cos, pow.
class Expr {
 public:
  Expr();
  explicit Expr(const std::string& text);

  double operator()(double x, double y = 0.0) const;

  const std::string& text() const { return text_; }
  bool uses_y() const;
  bool is_constant() const;

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fracwell
