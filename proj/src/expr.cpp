#include "fastlim/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fastlim {

struct Expr::Node {
  enum class Kind { number, var, unary, binary, call } kind;
  double value = 0;      // number
  char var = 0;          // 'x','y','L','M' (M = Ly)
  char op = 0;           // + - * / ^ or unary '-'
  int func = 0;          // index into function table
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Fn {
  const char* name;
  double (*f)(double);
};

constexpr Fn kFns[] = {
    {"cos", std::cos}, {"sin", std::sin},   {"exp", std::exp},
    {"sqrt", std::sqrt}, {"tanh", std::tanh}, {"abs", std::fabs},
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("expression error at position " +
                                std::to_string(pos_ + 1) + " in '" + s_ + "': " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr left = product();
    for (;;) {
      skip_ws();
      if (eat('+')) left = binary('+', left, product());
      else if (eat('-')) left = binary('-', left, product());
      else return left;
    }
  }

  NodePtr product() {
    NodePtr left = unary();
    for (;;) {
      skip_ws();
      if (eat('*')) left = binary('*', left, unary());
      else if (eat('/')) left = binary('/', left, unary());
      else return left;
    }
  }

  // Unary minus binds looser than '^': -x^2 is -(x^2).
  NodePtr unary() {
    skip_ws();
    if (eat('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::unary;
      n->op = '-';
      n->a = unary();
      return n;
    }
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return binary('^', base, unary()); // right associative
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a value");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* start = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - start);
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::number;
    n->value = v;
    return n;
  }

  NodePtr ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "pi") {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::number;
      n->value = std::numbers::pi;
      return n;
    }
    if (name == "x" || name == "y" || name == "L" || name == "Lx" || name == "Ly") {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Kind::var;
      n->var = (name == "y") ? 'y' : (name == "Ly") ? 'M' : (name == "x") ? 'x' : 'L';
      return n;
    }
    for (std::size_t i = 0; i < std::size(kFns); ++i) {
      if (name == kFns[i].name) {
        if (!eat('(')) fail("function '" + name + "' needs '('");
        NodePtr arg = sum();
        if (!eat(')')) fail("missing ')' after argument of '" + name + "'");
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Node::Kind::call;
        n->func = static_cast<int>(i);
        n->a = arg;
        return n;
      }
    }
    fail("unknown identifier '" + name + "'");
  }

  NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Kind::binary;
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, double x, double y, double Lx, double Ly) {
  switch (n.kind) {
    case Expr::Node::Kind::number:
      return n.value;
    case Expr::Node::Kind::var:
      switch (n.var) {
        case 'x': return x;
        case 'y': return y;
        case 'L': return Lx;
        default: return Ly;
      }
    case Expr::Node::Kind::unary:
      return -eval_node(*n.a, x, y, Lx, Ly);
    case Expr::Node::Kind::call:
      return kFns[n.func].f(eval_node(*n.a, x, y, Lx, Ly));
    case Expr::Node::Kind::binary: {
      const double a = eval_node(*n.a, x, y, Lx, Ly);
      const double b = eval_node(*n.b, x, y, Lx, Ly);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
  }
  return 0;
}

} // namespace

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  Expr e;
  e.root_ = p.parse();
  e.source_ = text;
  return e;
}

double Expr::eval(double x, double y, double Lx, double Ly) const {
  if (!root_) throw std::logic_error("Expr::eval on empty expression");
  return eval_node(*root_, x, y, Lx, Ly);
}

} // namespace fastlim
