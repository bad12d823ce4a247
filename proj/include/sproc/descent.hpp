#pragma once

#include <functional>
#include <span>

#include "sproc/linalg.hpp"

namespace sproc {

// Local solvers shared by the sampling-based searches. Function evaluations may
// throw DomainError; such trial points are treated as rejected steps.

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<Vector(std::span<const double>)>;
using ResidualFn = std::function<Vector(std::span<const double>)>;
using JacobianFn = std::function<Matrix(std::span<const double>)>;

struct LocalResult {
  Vector x;
  double value;
  int iterations = 0;
};

/// BFGS with Armijo backtracking. stop(x, f(x)) ends the run early when it returns true.
LocalResult minimize_bfgs(const ScalarFn& f, const GradientFn& grad, Vector x0, int max_iter,
                          const std::function<bool(std::span<const double>, double)>& stop = {});

/// Levenberg-Marquardt on 1/2 ||r(x)||^2; stops once the cost drops to target_cost.
LocalResult least_squares(const ResidualFn& residual, const JacobianFn& jacobian, Vector x0, int max_iter,
                          double target_cost = 0.0);

Matrix jacobian_fd(const ResidualFn& residual, std::span<const double> x, double h = 1e-6);

}  // namespace sproc
