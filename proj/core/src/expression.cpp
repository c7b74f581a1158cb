#include "topeig/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "topeig/errors.hpp"

namespace topeig {

struct Expression::Node {
  enum class Kind { Number, Variable, Norm, Neg, Add, Sub, Mul, Div, Pow, Exp, Abs };

  Kind kind;
  double number = 0.0;
  int variable = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(std::span<const double> x) const {
    switch (kind) {
      case Kind::Number: return number;
      case Kind::Variable: return x[static_cast<std::size_t>(variable)];
      case Kind::Norm: {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
      }
      case Kind::Neg: return -lhs->eval(x);
      case Kind::Add: return lhs->eval(x) + rhs->eval(x);
      case Kind::Sub: return lhs->eval(x) - rhs->eval(x);
      case Kind::Mul: return lhs->eval(x) * rhs->eval(x);
      case Kind::Div: return lhs->eval(x) / rhs->eval(x);
      case Kind::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Kind::Exp: return std::exp(lhs->eval(x));
      case Kind::Abs: return std::abs(lhs->eval(x));
    }
    return std::nan("");
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int dimension) : s_(text), dim_(dimension) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + std::string(s_) + "': " + what, pos_);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
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

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Node::Kind::Add, lhs, term());
      else if (accept('-')) lhs = make(Node::Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::Kind::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Node::Kind::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, base, unary());
    return base;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      const std::string id = identifier();
      if (id == "exp" || id == "abs") {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(id == "exp" ? Node::Kind::Exp : Node::Kind::Abs, arg);
      }
      if (id == "norm") {
        expect('(');
        skip();
        if (identifier() != "x") fail("norm() takes the point 'x' as its argument");
        expect(')');
        return make(Node::Kind::Norm);
      }
      if (id.size() >= 2 && id[0] == 'x' &&
          id.find_first_not_of("0123456789", 1) == std::string::npos) {
        const int index = std::stoi(id.substr(1));
        if (index < 1 || index > dim_) {
          pos_ = start;
          fail("variable '" + id + "' outside x1..x" + std::to_string(dim_));
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Variable;
        n->variable = index - 1;
        return n;
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = s_.data() + start;
    const char* last = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->number = value;
    return n;
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, int dimension) {
  if (dimension < 1) throw InvalidArgument("expression dimension must be positive");
  Parser parser(text, dimension);
  NodePtr root = parser.parse();
  return Expression(std::string(text), dimension, std::move(root));
}

double Expression::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_)
    throw InvalidArgument("expression evaluated at a point of the wrong dimension");
  return root_->eval(x);
}

}  // namespace topeig
