#include <algorithm>
#include "fracwell/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracwell/errors.hpp"

namespace fracwell {

struct Expr::Node {
  enum class Op { Num, X, Y, Neg, Add, Sub, Mul, Div, Pow, Call } op;
  double value = 0.0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double x, double y) const {
    switch (op) {
      case Op::Num: return value;
      case Op::X: return x;
      case Op::Y: return y;
      case Op::Neg: return -args[0]->eval(x, y);
      case Op::Add: return args[0]->eval(x, y) + args[1]->eval(x, y);
      case Op::Sub: return args[0]->eval(x, y) - args[1]->eval(x, y);
      case Op::Mul: return args[0]->eval(x, y) * args[1]->eval(x, y);
      case Op::Div: return args[0]->eval(x, y) / args[1]->eval(x, y);
      case Op::Pow: return std::pow(args[0]->eval(x, y), args[1]->eval(x, y));
      case Op::Call: break;
    }
    const double a = args[0]->eval(x, y);
    if (fn == "abs") return std::abs(a);
    if (fn == "exp") return std::exp(a);
    if (fn == "log") return std::log(a);
    if (fn == "sqrt") return std::sqrt(a);
    if (fn == "sin") return std::sin(a);
    if (fn == "cos") return std::cos(a);
    const double b = args[1]->eval(x, y);
    if (fn == "min") return std::min(a, b);
    if (fn == "max") return std::max(a, b);
    return std::pow(a, b);
  }

  bool mentions(Op v) const {
    if (op == v) return true;
    for (const auto& a : args)
      if (a->mentions(v)) return true;
    return false;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double v = 0.0,
             std::string fn = {}) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  n->value = v;
  n->fn = std::move(fn);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + s_ + "': " + msg + " at offset " +
                      std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr sum() {
    auto lhs = product();
    for (;;) {
      if (accept('+')) lhs = make(Op::Add, {lhs, product()});
      else if (accept('-')) lhs = make(Op::Sub, {lhs, product()});
      else return lhs;
    }
  }

  NodePtr product() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Op::Mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Op::Div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (accept('^')) return make(Op::Pow, {base, unary()});
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (accept('(')) {
      auto n = sum();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return make(Op::Num, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make(Op::X);
      if (id == "y") return make(Op::Y);
      if (id == "pi") return make(Op::Num, {}, std::numbers::pi);
      static const std::vector<std::string> unary_fns = {"abs", "exp", "log",
                                                         "sqrt", "sin", "cos"};
      static const std::vector<std::string> binary_fns = {"min", "max", "pow"};
      const bool is_unary =
          std::find(unary_fns.begin(), unary_fns.end(), id) != unary_fns.end();
      const bool is_binary =
          std::find(binary_fns.begin(), binary_fns.end(), id) != binary_fns.end();
      if (!is_unary && !is_binary) fail("unknown identifier '" + id + "'");
      expect('(');
      std::vector<NodePtr> args{sum()};
      if (is_binary) {
        expect(',');
        args.push_back(sum());
      }
      expect(')');
      return make(Op::Call, std::move(args), 0.0, id);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : Expr("0") {}

Expr::Expr(const std::string& text) : text_(text), root_(Parser(text).parse()) {}

double Expr::operator()(double x, double y) const { return root_->eval(x, y); }

bool Expr::uses_y() const { return root_->mentions(Node::Op::Y); }

bool Expr::is_constant() const {
  return !root_->mentions(Node::Op::X) && !root_->mentions(Node::Op::Y);
}

}  // namespace fracwell
