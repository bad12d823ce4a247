#include "sproc/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sproc/error.hpp"

namespace sproc {

QuadraticFunction::QuadraticFunction(Matrix q, Vector c, double d) : q_(std::move(q)), c_(std::move(c)), d_(d) {
  if (c_.empty()) throw InvalidArgument("quadratic function needs dimension n >= 1");
  if (q_.rows() != c_.size() || q_.cols() != c_.size())
    throw DimensionMismatch("Q must be " + std::to_string(c_.size()) + "x" + std::to_string(c_.size()));
  const double band = 1e-12 * (1.0 + q_.max_abs());
  if (asymmetry(q_) > band) throw InvalidArgument("Q is not symmetric");
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j) {
      const double avg = 0.5 * (q_(i, j) + q_(j, i));
      q_(i, j) = avg;
      q_(j, i) = avg;
    }
}

QuadraticFunction QuadraticFunction::affine(Vector a, double b) {
  const std::size_t n = a.size();
  return QuadraticFunction(Matrix(n, n), std::move(a), -b);
}

double QuadraticFunction::operator()(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionMismatch("quadratic evaluated at a point of the wrong size");
  return 0.5 * quadratic_form(q_, x) + dot(c_, x) + d_;
}

Vector QuadraticFunction::gradient(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionMismatch("quadratic gradient at a point of the wrong size");
  Vector g = q_ * x;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += c_[i];
  return g;
}

QuadraticFunction QuadraticFunction::scaled(double s) const {
  Vector c = c_;
  for (double& v : c) v *= s;
  return QuadraticFunction(s * q_, std::move(c), s * d_);
}

double evaluate_quadratic(const QuadraticFunction& q, std::span<const double> x) { return q(x); }

Matrix bordered_matrix(const QuadraticFunction& q) {
  const std::size_t n = q.dim();
  Matrix m(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = q.Q()(i, j);
    m(i, n) = q.c()[i];
    m(n, i) = q.c()[i];
  }
  m(n, n) = 2.0 * q.d();
  return m;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Zeroes a(p,q) with a plane rotation, accumulating it into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymmetricEigen eigen_sym(const Matrix& input, double tol) {
  if (!input.square()) throw DimensionMismatch("eigen_sym needs a square matrix");
  const std::size_t n = input.rows();
  if (asymmetry(input) > 1e-10 * (1.0 + input.max_abs())) throw InvalidArgument("eigen_sym needs a symmetric matrix");

  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  Matrix v = Matrix::identity(n);
  const double target = tol * a.frobenius_norm();

  int sweeps = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweeps == kJacobiMaxSweeps) throw NotConverged("Jacobi eigensolver did not converge in 100 sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out{Vector(n), Matrix(n, n), sweeps};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

MinEigen min_eigenvalue(const Matrix& a) {
  SymmetricEigen e = eigen_sym(a);
  return {e.eigenvalues.front(), e.eigenvectors.column(0)};
}

double psd_threshold(const Matrix& a, double rel_tol) { return -rel_tol * (1.0 + a.max_abs()); }

bool is_psd(const Matrix& a, double rel_tol) {
  if (a.rows() == 0) return true;
  return min_eigenvalue(a).value >= psd_threshold(a, rel_tol);
}

}  // namespace sproc
