#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sproc/linalg.hpp"

namespace sproc {

/// Scalar function of x1..xn parsed from text.
///
/// Grammar (whitespace ignored):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right-associative, binds tighter than unary minus
///   primary := number | 'x'<k> | func '(' expr (',' expr)? ')' | '(' expr ')'
///   func    := sin cos exp log sqrt abs (1 argument) | min max (2 arguments)
///
/// Expressions are immutable after parsing and may be shared across threads.
class Expression {
 public:
  enum class Kind : std::uint8_t { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  enum class Func : std::uint8_t { Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max };

  struct Node {
    Kind kind;
    Func func = Func::Sin;
    double value = 0.0;       // Constant
    std::size_t index = 0;    // Variable, zero-based
    std::int32_t lhs = -1;    // operand / first argument
    std::int32_t rhs = -1;    // second operand / argument
  };

  static Expression parse(std::string_view source, std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }

  double evaluate(std::span<const double> x) const;

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const { return render(root_); }

  std::span<const Node> nodes() const noexcept { return *nodes_; }
  std::int32_t root() const noexcept { return root_; }

 private:
  Expression(std::shared_ptr<const std::vector<Node>> nodes, std::int32_t root, std::size_t dimension)
      : nodes_(std::move(nodes)), root_(root), dimension_(dimension) {}

  double eval_node(std::int32_t id, std::span<const double> x) const;
  std::string render(std::int32_t id) const;

  std::shared_ptr<const std::vector<Node>> nodes_;
  std::int32_t root_ = -1;
  std::size_t dimension_ = 0;

  friend class ExpressionParser;
};

inline Expression parse(std::string_view source, std::size_t dimension) {
  return Expression::parse(source, dimension);
}

inline double evaluate(const Expression& e, std::span<const double> x) { return e.evaluate(x); }

inline constexpr double kDefaultFdStep = 1e-5;

/// Central differences: (e(x + h ei) - e(x - h ei)) / 2h.
Vector gradient_fd(const Expression& e, std::span<const double> x, double h = kDefaultFdStep);

}  // namespace sproc
