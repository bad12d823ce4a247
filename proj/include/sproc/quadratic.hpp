#pragma once

#include <cstddef>
#include <span>

#include "sproc/linalg.hpp"

namespace sproc {

/// q(x) = 1/2 <Qx, x> + <c, x> + d with Q symmetric.
class QuadraticFunction {
 public:
  /// Symmetrizes Q when its asymmetry is within 1e-12 (1 + max|Q|); rejects it otherwise.
  QuadraticFunction(Matrix q, Vector c, double d);

  /// Affine function <a, x> - b.
  static QuadraticFunction affine(Vector a, double b);

  std::size_t dim() const noexcept { return c_.size(); }
  const Matrix& Q() const noexcept { return q_; }
  const Vector& c() const noexcept { return c_; }
  double d() const noexcept { return d_; }

  bool is_affine() const noexcept { return q_.max_abs() == 0.0; }

  double operator()(std::span<const double> x) const;
  Vector gradient(std::span<const double> x) const;

  QuadraticFunction scaled(double s) const;

 private:
  Matrix q_;
  Vector c_;
  double d_;
};

double evaluate_quadratic(const QuadraticFunction& q, std::span<const double> x);

/// [[Q, c], [c^T, 2d]], so that [x;1]^T M [x;1] = 2 q(x). q >= 0 on R^n iff M is PSD.
Matrix bordered_matrix(const QuadraticFunction& q);

struct SymmetricEigen {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column k pairs with eigenvalues[k]
  int sweeps = 0;
};

inline constexpr double kJacobiTolerance = 1e-14;
inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm is at most tol * ||A||_F.
/// Throws NotConverged after 100 sweeps.
SymmetricEigen eigen_sym(const Matrix& a, double tol = kJacobiTolerance);

struct MinEigen {
  double value;
  Vector vector;  // unit length
};

MinEigen min_eigenvalue(const Matrix& a);

inline constexpr double kPsdRelativeTolerance = 1e-9;

/// -rel_tol (1 + ||A||_max): the PSD acceptance threshold for lambda_min.
double psd_threshold(const Matrix& a, double rel_tol = kPsdRelativeTolerance);

bool is_psd(const Matrix& a, double rel_tol = kPsdRelativeTolerance);

}  // namespace sproc
