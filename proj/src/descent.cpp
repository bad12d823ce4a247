#include "sproc/descent.hpp"

#include <cmath>
#include <limits>

#include "sproc/error.hpp"

namespace sproc {

namespace {

constexpr double kHuge = std::numeric_limits<double>::infinity();

double safe_eval(const ScalarFn& f, std::span<const double> x) {
  try {
    const double v = f(x);
    return std::isnan(v) ? kHuge : v;
  } catch (const DomainError&) {
    return kHuge;
  }
}

double cost_of(const Vector& r) { return 0.5 * dot(r, r); }

}  // namespace

LocalResult minimize_bfgs(const ScalarFn& f, const GradientFn& grad, Vector x0, int max_iter,
                          const std::function<bool(std::span<const double>, double)>& stop) {
  const std::size_t n = x0.size();
  LocalResult res{std::move(x0), 0.0, 0};
  res.value = safe_eval(f, res.x);
  if (!std::isfinite(res.value)) return res;
  if (stop && stop(res.x, res.value)) return res;
  Vector g;
  try {
    g = grad(res.x);
  } catch (const DomainError&) {
    return res;
  }
  Matrix h = Matrix::identity(n);
  Vector trial(n);
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    if (norm_inf(g) < 1e-12) break;
    Vector dir = h * g;
    for (double& v : dir) v = -v;
    double slope = dot(dir, g);
    if (slope >= 0.0) {
      h = Matrix::identity(n);
      dir = g;
      for (double& v : dir) v = -v;
      slope = -dot(g, g);
    }
    double step = 1.0;
    double ft = kHuge;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = res.x[i] + step * dir[i];
      ft = safe_eval(f, trial);
      if (ft <= res.value + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (!(ft <= res.value + 1e-4 * step * slope)) break;
    Vector gn;
    try {
      gn = grad(trial);
    } catch (const DomainError&) {
      break;
    }
    Vector s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - res.x[i];
      y[i] = gn[i] - g[i];
    }
    const double improvement = res.value - ft;
    res.x = trial;
    res.value = ft;
    g = std::move(gn);
    if (stop && stop(res.x, res.value)) break;
    if (improvement <= 1e-15 * (1.0 + std::abs(ft)) && norm_inf(s) < 1e-14 * (1.0 + norm_inf(res.x))) break;
    const double sy = dot(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      Vector hy = h * y;
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          h(i, j) += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
    }
  }
  return res;
}

Matrix jacobian_fd(const ResidualFn& residual, std::span<const double> x, double h) {
  Vector probe(x.begin(), x.end());
  Matrix j;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = probe[k];
    probe[k] = xk + h;
    const Vector up = residual(probe);
    probe[k] = xk - h;
    const Vector down = residual(probe);
    probe[k] = xk;
    if (k == 0) j = Matrix(up.size(), x.size());
    for (std::size_t i = 0; i < up.size(); ++i) j(i, k) = (up[i] - down[i]) / (2.0 * h);
  }
  return j;
}

LocalResult least_squares(const ResidualFn& residual, const JacobianFn& jacobian, Vector x0, int max_iter,
                          double target_cost) {
  const std::size_t n = x0.size();
  LocalResult res{std::move(x0), kHuge, 0};
  Vector r;
  try {
    r = residual(res.x);
  } catch (const DomainError&) {
    return res;
  }
  res.value = cost_of(r);
  double lambda = 1e-3;
  Vector trial(n);
  for (int it = 0; it < max_iter && res.value > target_cost; ++it) {
    res.iterations = it + 1;
    Matrix jac;
    try {
      jac = jacobian(res.x);
    } catch (const DomainError&) {
      break;
    }
    const std::size_t k = jac.rows();
    Matrix jtj(n, n);
    Vector g(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t i = 0; i < k; ++i) g[a] += jac(i, a) * r[i];
      for (std::size_t b = a; b < n; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += jac(i, a) * jac(i, b);
        jtj(a, b) = s;
        jtj(b, a) = s;
      }
    }
    if (norm_inf(g) <= 1e-300) break;
    bool accepted = false;
    while (lambda < 1e14) {
      Matrix sys = jtj;
      for (std::size_t a = 0; a < n; ++a) sys(a, a) += lambda * (1.0 + jtj(a, a));
      Vector rhs = g;
      for (double& v : rhs) v = -v;
      auto step = solve_linear(sys, rhs, 1e-300);
      if (!step) {
        lambda *= 4.0;
        continue;
      }
      for (std::size_t a = 0; a < n; ++a) trial[a] = res.x[a] + (*step)[a];
      Vector rt;
      double ct = kHuge;
      try {
        rt = residual(trial);
        ct = cost_of(rt);
      } catch (const DomainError&) {
      }
      if (ct < res.value) {
        const double gain = res.value - ct;
        res.x = trial;
        r = std::move(rt);
        res.value = ct;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (gain <= 1e-16 * ct && norm_inf(*step) <= 1e-15 * (1.0 + norm_inf(res.x))) lambda = 1e14;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted || lambda >= 1e14) break;
  }
  return res;
}

}  // namespace sproc
