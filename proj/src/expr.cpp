#include "rbsde/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace rbsde {

struct Expr::Node {
  enum class Op {
    constant, var_n, var_t, var_w,
    add, sub, mul, div, neg,
    lt, le, gt, ge, eq, ne,
    fmax, fmin, fabs, fexp
  };
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using P = std::shared_ptr<const Node>;

P make(Node::Op op, P a = nullptr, P b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct Parser {
  const std::string& s;
  std::size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ScenarioParseError("expression error: " + what, 1, static_cast<int>(i) + 1);
  }
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool peek_is(char c) {
    skip_ws();
    return i < s.size() && s[i] == c;
  }

  P parse_cmp() {
    P lhs = parse_sum();
    skip_ws();
    if (i >= s.size()) return lhs;
    Node::Op op;
    if (s.compare(i, 2, "<=") == 0) { op = Node::Op::le; i += 2; }
    else if (s.compare(i, 2, ">=") == 0) { op = Node::Op::ge; i += 2; }
    else if (s.compare(i, 2, "==") == 0) { op = Node::Op::eq; i += 2; }
    else if (s.compare(i, 2, "!=") == 0) { op = Node::Op::ne; i += 2; }
    else if (s[i] == '<') { op = Node::Op::lt; ++i; }
    else if (s[i] == '>') { op = Node::Op::gt; ++i; }
    else return lhs;
    return make(op, lhs, parse_sum());
  }

  P parse_sum() {
    P lhs = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+')) lhs = make(Node::Op::add, lhs, parse_term());
      else if (eat('-')) lhs = make(Node::Op::sub, lhs, parse_term());
      else return lhs;
    }
  }

  P parse_term() {
    P lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (eat('*')) lhs = make(Node::Op::mul, lhs, parse_unary());
      else if (eat('/')) lhs = make(Node::Op::div, lhs, parse_unary());
      else return lhs;
    }
  }

  P parse_unary() {
    if (eat('-')) return make(Node::Op::neg, parse_unary());
    return parse_primary();
  }

  P parse_primary() {
    skip_ws();
    if (i >= s.size()) fail("unexpected end of expression");
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s.c_str() + i, &end);
      if (end == s.c_str() + i) fail("bad number");
      i = static_cast<std::size_t>(end - s.c_str());
      auto n = std::make_shared<Node>();
      n->op = Node::Op::constant;
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++i;
      P inner = parse_cmp();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
      const std::string name = s.substr(i, j - i);
      i = j;
      if (!peek_is('(')) {
        if (name == "n") return make(Node::Op::var_n);
        if (name == "t") return make(Node::Op::var_t);
        if (name == "W" || name == "w") return make(Node::Op::var_w);
        fail("unknown identifier '" + name + "'");
      }
      eat('(');
      if (name == "abs" || name == "exp") {
        P a = parse_cmp();
        if (!eat(')')) fail("expected ')'");
        return make(name == "abs" ? Node::Op::fabs : Node::Op::fexp, a);
      }
      if (name == "max" || name == "min") {
        P a = parse_cmp();
        if (!eat(',')) fail("expected ','");
        P b = parse_cmp();
        if (!eat(')')) fail("expected ')'");
        return make(name == "max" ? Node::Op::fmax : Node::Op::fmin, a, b);
      }
      fail("unknown function '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

double eval_node(const Node& n, double nn, double t, double w) {
  switch (n.op) {
    case Node::Op::constant: return n.value;
    case Node::Op::var_n: return nn;
    case Node::Op::var_t: return t;
    case Node::Op::var_w: return w;
    case Node::Op::add: return eval_node(*n.a, nn, t, w) + eval_node(*n.b, nn, t, w);
    case Node::Op::sub: return eval_node(*n.a, nn, t, w) - eval_node(*n.b, nn, t, w);
    case Node::Op::mul: return eval_node(*n.a, nn, t, w) * eval_node(*n.b, nn, t, w);
    case Node::Op::div: return eval_node(*n.a, nn, t, w) / eval_node(*n.b, nn, t, w);
    case Node::Op::neg: return -eval_node(*n.a, nn, t, w);
    case Node::Op::lt: return eval_node(*n.a, nn, t, w) < eval_node(*n.b, nn, t, w) ? 1.0 : 0.0;
    case Node::Op::le: return eval_node(*n.a, nn, t, w) <= eval_node(*n.b, nn, t, w) ? 1.0 : 0.0;
    case Node::Op::gt: return eval_node(*n.a, nn, t, w) > eval_node(*n.b, nn, t, w) ? 1.0 : 0.0;
    case Node::Op::ge: return eval_node(*n.a, nn, t, w) >= eval_node(*n.b, nn, t, w) ? 1.0 : 0.0;
    case Node::Op::eq: return eval_node(*n.a, nn, t, w) == eval_node(*n.b, nn, t, w) ? 1.0 : 0.0;
    case Node::Op::ne: return eval_node(*n.a, nn, t, w) != eval_node(*n.b, nn, t, w) ? 1.0 : 0.0;
    case Node::Op::fmax: return std::max(eval_node(*n.a, nn, t, w), eval_node(*n.b, nn, t, w));
    case Node::Op::fmin: return std::min(eval_node(*n.a, nn, t, w), eval_node(*n.b, nn, t, w));
    case Node::Op::fabs: return std::abs(eval_node(*n.a, nn, t, w));
    case Node::Op::fexp: return std::exp(eval_node(*n.a, nn, t, w));
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p{text};
  Expr e;
  e.root_ = p.parse_cmp();
  p.skip_ws();
  if (p.i != text.size()) p.fail("trailing input");
  e.text_ = text;
  return e;
}

double Expr::eval(double n, double t, double w) const {
  return eval_node(*root_, n, t, w);
}

}  // namespace rbsde
