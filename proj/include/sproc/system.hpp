#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sproc/expr.hpp"
#include "sproc/linalg.hpp"
#include "sproc/quadratic.hpp"

namespace sproc {

/// One of f0, f1, ..., fp: a quadratic (affine when Q = 0) or a parsed expression.
class Function {
 public:
  Function(QuadraticFunction q) : impl_(std::move(q)) {}  // NOLINT(google-explicit-constructor)
  Function(Expression e) : impl_(std::move(e)) {}         // NOLINT(google-explicit-constructor)

  bool is_quadratic() const noexcept { return std::holds_alternative<QuadraticFunction>(impl_); }
  const QuadraticFunction* quadratic() const noexcept { return std::get_if<QuadraticFunction>(&impl_); }
  const Expression* expression() const noexcept { return std::get_if<Expression>(&impl_); }

  std::size_t dim() const noexcept;
  double operator()(std::span<const double> x) const;
  /// Analytic for quadratics, central differences for expressions.
  Vector gradient(std::span<const double> x) const;
  std::string describe() const;

 private:
  std::variant<QuadraticFunction, Expression> impl_;
};

/// The data (f0; f1, ..., fp) of an S-procedure instance.
class FunctionSystem {
 public:
  enum class Kind { AllQuadratic, Mixed };

  FunctionSystem(Function objective, std::vector<Function> constraints);

  std::size_t dim() const noexcept { return n_; }
  std::size_t num_constraints() const noexcept { return functions_.size() - 1; }

  /// i = 0 is f0, i = 1..p the constraints.
  const Function& function(std::size_t i) const { return functions_.at(i); }
  const Function& objective() const noexcept { return functions_.front(); }

  Kind kind() const noexcept { return kind_; }
  bool all_quadratic() const noexcept { return kind_ == Kind::AllQuadratic; }
  bool all_affine() const noexcept;

  /// (f0(x), ..., fp(x)).
  Vector values(std::span<const double> x) const;
  /// z(x) = (f0(x), -f1(x), ..., -fp(x)), a point of the image set F.
  Vector image(std::span<const double> x) const;
  /// Rows are the gradients of the components of z.
  Matrix image_jacobian(std::span<const double> x) const;

  /// Throws InvalidArgument unless the system is all-quadratic.
  std::vector<QuadraticFunction> quadratics() const;

 private:
  std::size_t n_;
  std::vector<Function> functions_;
  Kind kind_;
};

std::string_view to_string(FunctionSystem::Kind kind);

}  // namespace sproc
