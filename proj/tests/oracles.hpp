#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the solvers under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "sproc/linalg.hpp"
#include "sproc/linprog.hpp"
#include "sproc/quadratic.hpp"
#include "sproc/rng.hpp"
#include "sproc/system.hpp"

namespace oracle {

using sproc::Matrix;
using sproc::Vector;

// ---------------------------------------------------------------------------
// Grid adjudication of (I) on [-R, R]^n.

enum class GridVerdict { Holds, Violated };

struct GridResult {
  GridVerdict verdict = GridVerdict::Holds;
  Vector x;  // a grid counterexample when Violated
};

/// (I) is declared violated iff some grid point has fi >= -tol for all i and f0 < -tol.
inline GridResult grid_adjudicate(const std::function<Vector(const Vector&)>& values, std::size_t n,
                                  double radius = 10.0, int per_axis = 41, double tol = 1e-6) {
  std::vector<int> idx(n, 0);
  Vector x(n);
  const double step = 2.0 * radius / (per_axis - 1);
  while (true) {
    for (std::size_t k = 0; k < n; ++k) x[k] = -radius + step * idx[k];
    const Vector v = values(x);
    bool feasible = true;
    for (std::size_t i = 1; i < v.size() && feasible; ++i) feasible = v[i] >= -tol;
    if (feasible && v[0] < -tol) return {GridVerdict::Violated, x};
    std::size_t k = 0;
    while (k < n && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == n) break;
  }
  return {};
}

/// Plain quadratic evaluation, independent of sproc::QuadraticFunction.
struct RawQuadratic {
  Matrix Q;
  Vector c;
  double d = 0.0;

  double operator()(const Vector& x) const {
    double s = d;
    for (std::size_t i = 0; i < c.size(); ++i) {
      s += c[i] * x[i];
      for (std::size_t j = 0; j < c.size(); ++j) s += 0.5 * Q(i, j) * x[i] * x[j];
    }
    return s;
  }
};

inline GridResult grid_adjudicate(const std::vector<RawQuadratic>& qs, double radius = 10.0, int per_axis = 41,
                                  double tol = 1e-6) {
  return grid_adjudicate(
      [&](const Vector& x) {
        Vector v;
        for (const auto& q : qs) v.push_back(q(x));
        return v;
      },
      qs.front().c.size(), radius, per_axis, tol);
}

inline RawQuadratic raw(const sproc::QuadraticFunction& q) { return {q.Q(), q.c(), q.d()}; }

inline std::vector<RawQuadratic> raw(const sproc::FunctionSystem& s) {
  std::vector<RawQuadratic> out;
  for (const auto& q : s.quadratics()) out.push_back(raw(q));
  return out;
}

// ---------------------------------------------------------------------------
// Small dense helpers.

/// Gaussian elimination with full pivoting; empty when singular.
inline std::optional<Vector> solve_dense(Matrix a, Vector b) {
  const std::size_t n = b.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k, pc = k;
    double best = 0.0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          pr = i;
          pc = j;
        }
    if (best < 1e-12) return std::nullopt;
    for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
    std::swap(b[k], b[pr]);
    for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, pc));
    std::swap(perm[k], perm[pc]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vector y(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * y[j];
    y[i] = s / a(i, i);
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm[i]] = y[i];
  return x;
}

// ---------------------------------------------------------------------------
// LP reference: vertex enumeration over a bounded feasible set.

struct VertexResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Vector y;
};

/// Enumerates every basic solution of A y <= b, E y = g, lower <= y <= upper (all bounds finite).
inline VertexResult enumerate_vertices(const sproc::LinearProgram& lp, double feas_tol = 1e-9) {
  const std::size_t m = lp.num_vars();
  std::vector<Vector> rows;
  Vector rhs;
  for (std::size_t i = 0; i < lp.inequality_rows.size(); ++i) {
    rows.push_back(lp.inequality_rows[i]);
    rhs.push_back(lp.inequality_rhs[i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    Vector up(m, 0.0), lo(m, 0.0);
    up[j] = 1.0;
    lo[j] = -1.0;
    rows.push_back(up);
    rhs.push_back(lp.upper[j]);
    rows.push_back(lo);
    rhs.push_back(-lp.lower[j]);
  }
  const std::size_t l = lp.equality_rows.size();
  VertexResult best;
  if (l > m) return best;
  const std::size_t choose = m - l;
  std::vector<std::size_t> pick(choose);
  for (std::size_t i = 0; i < choose; ++i) pick[i] = i;
  auto feasible = [&](const Vector& y) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double s = 0.0;
      double scale = 1.0 + std::abs(rhs[i]);
      for (std::size_t j = 0; j < m; ++j) {
        s += rows[i][j] * y[j];
        scale = std::max(scale, std::abs(rows[i][j] * y[j]));
      }
      if (s > rhs[i] + feas_tol * scale) return false;
    }
    for (std::size_t i = 0; i < l; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += lp.equality_rows[i][j] * y[j];
      if (std::abs(s - lp.equality_rhs[i]) > feas_tol * (1.0 + std::abs(lp.equality_rhs[i]))) return false;
    }
    return true;
  };
  if (choose > rows.size()) return best;
  while (true) {
    Matrix a(m, m);
    Vector b(m);
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < m; ++j) a(i, j) = lp.equality_rows[i][j];
      b[i] = lp.equality_rhs[i];
    }
    for (std::size_t k = 0; k < choose; ++k) {
      for (std::size_t j = 0; j < m; ++j) a(l + k, j) = rows[pick[k]][j];
      b[l + k] = rhs[pick[k]];
    }
    if (auto y = solve_dense(a, b); y && feasible(*y)) {
      double obj = 0.0;
      for (std::size_t j = 0; j < m; ++j) obj += lp.objective[j] * (*y)[j];
      if (obj < best.objective) {
        best.objective = obj;
        best.y = *y;
      }
      best.feasible = true;
    }
    // next combination
    std::size_t i = choose;
    while (i > 0 && pick[i - 1] == rows.size() - choose + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < choose; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

/// Lagrangian dual objective from the reported multipliers, assembled from scratch:
/// -b^T u - g^T v + sum_j (r_j > 0 ? r_j l_j : r_j u_j), with r = c + A^T u + E^T v.
inline double dual_objective(const sproc::LinearProgram& lp, const Vector& u, const Vector& v) {
  const std::size_t m = lp.num_vars();
  Vector r = lp.objective;
  double val = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    val -= lp.inequality_rhs[i] * u[i];
    for (std::size_t j = 0; j < m; ++j) r[j] += lp.inequality_rows[i][j] * u[i];
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    val -= lp.equality_rhs[i] * v[i];
    for (std::size_t j = 0; j < m; ++j) r[j] += lp.equality_rows[i][j] * v[i];
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (r[j] > 0) val += r[j] * lp.lower[j];
    else if (r[j] < 0) val += r[j] * lp.upper[j];
  }
  return val;
}

/// Random bounded LP: m <= max_m variables in boxes, k <= max_k inequalities, up to 2 equalities.
inline sproc::LinearProgram random_lp(sproc::SplitMix64& rng, std::size_t max_m = 6, std::size_t max_k = 12) {
  const std::size_t m = 1 + rng.below(max_m);
  const std::size_t k = 1 + rng.below(max_k);
  const std::size_t l = std::min<std::size_t>(rng.below(3), m - 1);
  sproc::LinearProgram lp(m);
  for (auto& c : lp.objective) c = rng.uniform(-1.0, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = rng.uniform(-2.0, 0.0);
    lp.set_bounds(j, lo, lo + rng.uniform(0.5, 3.0));
  }
  for (std::size_t i = 0; i < k; ++i) {
    Vector row(m);
    for (auto& a : row) a = rng.uniform(-1.0, 1.0);
    lp.add_inequality(std::move(row), rng.uniform(-1.0, 2.0));
  }
  for (std::size_t i = 0; i < l; ++i) {
    Vector row(m);
    for (auto& a : row) a = rng.uniform(-1.0, 1.0);
    lp.add_equality(std::move(row), rng.uniform(-0.5, 0.5));
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Eigenvalue references.

/// Roots of the characteristic polynomial of a symmetric 2x2 matrix, ascending.
inline Vector eig2(double a, double b, double d) {
  const double m = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), b);
  return {m - r, m + r};
}

/// Roots of the characteristic polynomial of a symmetric 3x3 matrix (trigonometric form), ascending.
inline Vector eig3(const Matrix& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  if (p1 == 0.0) {
    Vector e = {a(0, 0), a(1, 1), a(2, 2)};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Matrix b(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                      b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                      b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = std::acos(-1.0);
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  Vector e = {e1, e2, e3};
  std::sort(e.begin(), e.end());
  return e;
}

inline Matrix random_symmetric(std::size_t n, sproc::SplitMix64& rng, double scale = 1.0) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = scale * rng.uniform(-1.0, 1.0);
  return a;
}

// ---------------------------------------------------------------------------
// Instance generators.

inline Matrix random_normal_symmetric(std::size_t n, sproc::SplitMix64& rng) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.normal();
  return a;
}

inline sproc::QuadraticFunction random_normal_quadratic(std::size_t n, sproc::SplitMix64& rng) {
  Matrix q = random_normal_symmetric(n, rng);
  Vector c(n);
  for (auto& v : c) v = rng.normal();
  return {std::move(q), std::move(c), rng.normal()};
}

/// Random Gram-type PSD matrix L L^T + shift I.
inline Matrix random_psd(std::size_t n, sproc::SplitMix64& rng, double shift = 0.0) {
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) l(i, j) = rng.normal();
  Matrix g = l * l.transposed();
  for (std::size_t i = 0; i < n; ++i) g(i, i) += shift;
  return g;
}

/// A quadratic whose bordered matrix is positive definite (so q > 0 everywhere).
inline sproc::QuadraticFunction random_positive_quadratic(std::size_t n, sproc::SplitMix64& rng, double shift) {
  const Matrix m = random_psd(n + 1, rng, shift);
  Matrix q(n, n);
  Vector c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q(i, j) = m(i, j);
    c[i] = m(i, n);
  }
  return {std::move(q), std::move(c), 0.5 * m(n, n)};
}

}  // namespace oracle
