#pragma once

// Closed-form scalar expressions over a point x = (x1, ..., xd).
//
// Grammar (whitespace insignificant):
//
//   expr    := term  (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' digits | '(' expr ')'
//            | 'exp' '(' expr ')' | 'abs' '(' expr ')' | 'norm' '(' 'x' ')'
//
// Unary minus binds looser than '^', so "-x1^2" is -(x1^2).
// norm(x) is the Euclidean norm of the whole point.

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace topeig {

class Expression {
 public:
  /// Parses `text` for points of dimension `dimension`. Throws ParseError.
  static Expression parse(std::string_view text, int dimension);

  double operator()(std::span<const double> x) const;

  const std::string& text() const noexcept { return text_; }
  int dimension() const noexcept { return dimension_; }

  struct Node;

 private:
  Expression(std::string text, int dimension, std::shared_ptr<const Node> root)
      : text_(std::move(text)), dimension_(dimension), root_(std::move(root)) {}

  std::string text_;
  int dimension_;
  std::shared_ptr<const Node> root_;
};

}  // namespace topeig
