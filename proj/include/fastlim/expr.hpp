#pragma once

#include <memory>
#include <string>

namespace fastlim {

// Arithmetic expressions over the spatial coordinates, for initial data.
// Supports + - * / ^, parentheses, numbers, the variables x and y, the
// extents Lx and Ly (L aliases Lx), the constant pi, and the functions
// cos, sin, exp, sqrt, tanh, abs.
class Expr {
 public:
  Expr() = default;
  double eval(double x, double y, double Lx, double Ly) const;
  bool empty() const { return root_ == nullptr; }
  const std::string& source() const { return source_; }

  struct Node;
  static Expr parse(const std::string& text); // throws std::invalid_argument

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

} // namespace fastlim
