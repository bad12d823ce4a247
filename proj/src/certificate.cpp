#include "sproc/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sproc/descent.hpp"
#include "sproc/error.hpp"
#include "sproc/linprog.hpp"
#include "sproc/rng.hpp"

namespace sproc {

std::string_view to_string(Verification v) {
  switch (v) {
    case Verification::ExactPSD:
      return "ExactPSD";
    case Verification::SampledOnly:
      return "SampledOnly";
    case Verification::Failed:
      return "Failed";
  }
  return "?";
}

std::string_view to_string(SeparationStatus s) {
  switch (s) {
    case SeparationStatus::Found:
      return "Found";
    case SeparationStatus::NoSeparator:
      return "NoSeparator";
    case SeparationStatus::SlaterBlocked:
      return "SlaterBlocked";
    case SeparationStatus::RefinementExhausted:
      return "RefinementExhausted";
  }
  return "?";
}

Matrix combined_bordered_matrix(std::span<const Matrix> bordered, std::span<const double> alpha) {
  if (alpha.size() + 1 != bordered.size()) throw DimensionMismatch("alpha must have one entry per constraint");
  Matrix m = bordered[0];
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    const Matrix& mi = bordered[i + 1];
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) -= alpha[i] * mi(r, c);
  }
  return m;
}

std::vector<Matrix> bordered_matrices(const FunctionSystem& system) {
  std::vector<Matrix> out;
  for (const auto& q : system.quadratics()) out.push_back(bordered_matrix(q));
  return out;
}

namespace {

void check_alpha(const FunctionSystem& system, std::span<const double> alpha) {
  if (alpha.size() != system.num_constraints())
    throw DimensionMismatch("expected " + std::to_string(system.num_constraints()) + " multipliers, got " +
                            std::to_string(alpha.size()));
  for (double a : alpha)
    if (a < 0.0 || std::isnan(a)) throw NegativeMultiplier("multipliers must be nonnegative");
}

struct Evaluation {
  double value;      // lambda_min
  double threshold;  // -tol (1 + ||M||_max)
  Vector vector;
};

Evaluation evaluate_lagrangian(std::span<const Matrix> bordered, std::span<const double> alpha, double tol) {
  const Matrix m = combined_bordered_matrix(bordered, alpha);
  MinEigen e = min_eigenvalue(m);
  return {e.value, psd_threshold(m, tol), std::move(e.vector)};
}

double combined_value(const FunctionSystem& system, std::span<const double> alpha, std::span<const double> x) {
  double g = system.objective()(x);
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] != 0.0) g -= alpha[i] * system.function(i + 1)(x);
  return g;
}

Vector combined_gradient(const FunctionSystem& system, std::span<const double> alpha, std::span<const double> x) {
  Vector g = system.objective().gradient(x);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    const Vector gi = system.function(i + 1).gradient(x);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] -= alpha[i] * gi[k];
  }
  return g;
}

}  // namespace

QuadraticVerification verify_certificate_quadratic(const FunctionSystem& system, std::span<const double> alpha,
                                                   double tol) {
  check_alpha(system, alpha);
  const std::vector<Matrix> bordered = bordered_matrices(system);
  Evaluation e = evaluate_lagrangian(bordered, alpha, tol);
  QuadraticVerification res;
  res.lambda_min = e.value;
  res.threshold = e.threshold;
  res.valid = e.value >= e.threshold;
  res.direction = std::move(e.vector);
  if (!res.valid) {
    const std::size_t n = system.dim();
    const double last = res.direction[n];
    if (std::abs(last) >= 1e-8) {
      Vector x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = res.direction[i] / last;
      res.violating_x = std::move(x);
    }
  }
  return res;
}

SampledVerification verify_certificate_sampled(const FunctionSystem& system, std::span<const double> alpha,
                                               double radius, std::size_t samples, std::uint64_t seed) {
  check_alpha(system, alpha);
  if (samples == 0) throw InvalidArgument("sampled verification needs at least one sample");
  SampledVerification res;
  SplitMix64 rng(seed);
  std::vector<std::pair<double, Vector>> seen;
  Vector x(system.dim());
  for (std::size_t k = 0; k < samples; ++k) {
    rng.fill_box(x, radius);
    try {
      seen.emplace_back(combined_value(system, alpha, x), x);
    } catch (const DomainError&) {
      ++res.skipped;
    }
  }
  if (seen.empty()) throw SamplingError("no sample point lies in the functions' domain");
  const std::size_t keep = std::min<std::size_t>(10, seen.size());
  std::partial_sort(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(keep), seen.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  res.min_observed = seen.front().first;
  res.value = seen.front().first;
  res.x = seen.front().second;

  const Vector a(alpha.begin(), alpha.end());
  ScalarFn f = [&](std::span<const double> p) { return combined_value(system, a, p); };
  GradientFn g = [&](std::span<const double> p) { return combined_gradient(system, a, p); };
  auto diverged = [](std::span<const double>, double v) { return v < -1e12; };
  for (std::size_t k = 0; k < keep; ++k) {
    const LocalResult local = minimize_bfgs(f, g, seen[k].second, 200, diverged);
    if (local.value < res.value) {
      res.value = local.value;
      res.x = local.x;
    }
  }
  res.violated = res.value < -kSampledViolation;
  return res;
}

CertificateSearch find_certificate_p1(const FunctionSystem& system, double alpha_max, double tol) {
  if (system.num_constraints() != 1) throw InvalidArgument("find_certificate_p1 needs exactly one constraint");
  if (!(alpha_max > 0.0)) throw InvalidArgument("alpha_max must be positive");
  const std::vector<Matrix> bordered = bordered_matrices(system);

  CertificateSearch res;
  double best_alpha = 0.0;
  Evaluation best{-kInf, 0.0, {}};
  auto probe = [&](double a) {
    const double alpha[1] = {a};
    Evaluation e = evaluate_lagrangian(bordered, alpha, tol);
    if (e.value > best.value) {
      best = e;
      best_alpha = a;
    }
    return e.value;
  };

  probe(0.0);
  probe(alpha_max);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = alpha_max;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double g1 = probe(x1);
  double g2 = probe(x2);
  int it = 0;
  for (; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = probe(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = probe(x1);
    }
  }
  res.iterations = it;
  res.certificate.alpha = {best_alpha};
  res.certificate.lambda_min = best.value;
  res.found = best.value >= best.threshold;
  res.certificate.verified = res.found ? Verification::ExactPSD : Verification::Failed;
  res.boundary = !res.found && best_alpha >= alpha_max * (1.0 - 1e-9);
  return res;
}

CertificateSearch find_certificate_general(const FunctionSystem& system, int iterations, std::uint64_t /*seed*/,
                                           double tol) {
  const std::size_t p = system.num_constraints();
  if (p < 1) throw InvalidArgument("find_certificate_general needs at least one constraint");
  const std::vector<Matrix> bordered = bordered_matrices(system);
  double mmax = 0.0;
  for (std::size_t i = 1; i < bordered.size(); ++i) mmax = std::max(mmax, bordered[i].max_abs());
  const double a0 = 1.0 / (1.0 + mmax);

  CertificateSearch res;
  Vector alpha(p, 0.0);
  Vector best_alpha = alpha;
  Evaluation best{-kInf, 0.0, {}};
  for (int k = 1; k <= iterations; ++k) {
    res.iterations = k;
    Evaluation e = evaluate_lagrangian(bordered, alpha, tol);
    if (e.value > best.value) {
      best_alpha = alpha;
      best = e;
    }
    if (best.value >= best.threshold && k > 1) break;
    const double step = a0 / std::sqrt(static_cast<double>(k));
    for (std::size_t i = 0; i < p; ++i) {
      const double s = -quadratic_form(bordered[i + 1], e.vector);
      alpha[i] = std::max(0.0, alpha[i] + step * s);
    }
  }
  res.certificate.alpha = best_alpha;
  res.certificate.lambda_min = best.value;
  res.found = best.value >= best.threshold;
  res.certificate.verified = res.found ? Verification::ExactPSD : Verification::Failed;
  return res;
}

CertificateSearch find_certificate_affine(const FunctionSystem& system, double tol) {
  if (!system.all_affine()) throw InvalidArgument("find_certificate_affine needs an all-affine system");
  const auto qs = system.quadratics();
  const std::size_t p = system.num_constraints();
  const std::size_t n = system.dim();
  CertificateSearch res;
  res.certificate.alpha.assign(p, 0.0);

  LinearProgram lp(p);
  for (std::size_t i = 0; i < p; ++i) lp.objective[i] = qs[i + 1].d();  // min sum alpha_i d_i
  for (std::size_t k = 0; k < n; ++k) {
    Vector row(p);
    for (std::size_t i = 0; i < p; ++i) row[i] = qs[i + 1].c()[k];
    lp.add_equality(std::move(row), qs[0].c()[k]);
  }
  LpOutcome out = solve_lp(lp);
  if (out.status == LpStatus::Unbounded) {
    // d(alpha) is unbounded above on the feasible set; any feasible point will do.
    LinearProgram feas = lp;
    std::fill(feas.objective.begin(), feas.objective.end(), 0.0);
    out = solve_lp(feas);
  }
  if (out.status == LpStatus::Optimal) {
    res.certificate.alpha = out.solution;
    for (double& a : res.certificate.alpha) a = std::max(0.0, a);
  }
  const QuadraticVerification v = verify_certificate_quadratic(system, res.certificate.alpha, tol);
  res.certificate.lambda_min = v.lambda_min;
  res.found = out.status == LpStatus::Optimal && v.valid;
  res.certificate.verified = res.found ? Verification::ExactPSD : Verification::Failed;
  res.iterations = static_cast<int>(out.pivots);
  return res;
}

SeparationSearch find_certificate_via_separation(const FunctionSystem& system, const ImageCloud& input,
                                                 const SeparationOptions& options) {
  if (input.size() == 0) throw InvalidArgument("empty image cloud");
  if (input.image_dim() != system.num_constraints() + 1) throw DimensionMismatch("cloud does not match the system");
  ImageCloud cloud = input;
  SeparationSearch res;
  const std::size_t p = system.num_constraints();
  const std::size_t n = system.dim();

  auto add_point = [&](const Vector& x) {
    try {
      cloud.add(x, system.image(x));
    } catch (const DomainError&) {
    }
  };

  for (int round = 0;; ++round) {
    res.rounds = round;
    res.cloud_size = cloud.size();
    const SeparatorSearch sep = extract_separator(cloud, options.lp_tol);
    res.separator = sep.best;
    if (!sep.separator) {
      res.status = SeparationStatus::NoSeparator;
      res.witness = sep.witness;
      return res;
    }
    const double alpha0 = sep.separator->alpha[0];
    if (alpha0 < options.alpha0_floor) {
      res.status = SeparationStatus::SlaterBlocked;
      return res;
    }
    Vector alpha(p);
    for (std::size_t i = 0; i < p; ++i) alpha[i] = sep.separator->alpha[i + 1] / alpha0;
    res.certificate.alpha = alpha;

    std::vector<Vector> cuts;
    if (system.all_quadratic()) {
      const QuadraticVerification v = verify_certificate_quadratic(system, alpha, options.psd_tol);
      res.certificate.lambda_min = v.lambda_min;
      if (v.valid) {
        res.certificate.verified = Verification::ExactPSD;
        res.status = SeparationStatus::Found;
        return res;
      }
      if (v.violating_x) cuts.push_back(*v.violating_x);
      Vector dir(v.direction.begin(), v.direction.begin() + static_cast<std::ptrdiff_t>(n));
      const double len = norm2(dir);
      if (len > 0.0)
        for (double scale : {options.radius, 10.0 * options.radius}) {
          Vector x(n);
          Vector y(n);
          for (std::size_t k = 0; k < n; ++k) {
            x[k] = dir[k] / len * scale;
            y[k] = -x[k];
          }
          cuts.push_back(std::move(x));
          cuts.push_back(std::move(y));
        }
      // Unconstrained minimizer of f0 - sum alpha_i fi when it is strictly convex.
      const auto qs = system.quadratics();
      Matrix h = qs[0].Q();
      Vector c = qs[0].c();
      for (std::size_t i = 0; i < p; ++i) {
        h -= alpha[i] * qs[i + 1].Q();
        for (std::size_t k = 0; k < n; ++k) c[k] -= alpha[i] * qs[i + 1].c()[k];
      }
      for (double& v2 : c) v2 = -v2;
      if (min_eigenvalue(h).value > 0.0)
        if (auto xm = solve_linear(h, c)) cuts.push_back(std::move(*xm));
    } else {
      const SampledVerification v = verify_certificate_sampled(system, alpha, options.radius, options.verify_samples,
                                                               derive_seed(options.seed, static_cast<std::uint64_t>(round)));
      res.certificate.lambda_min = v.value;
      if (!v.violated) {
        res.certificate.verified = Verification::SampledOnly;
        res.status = SeparationStatus::Found;
        return res;
      }
      cuts.push_back(v.x);
    }
    res.certificate.verified = Verification::Failed;
    if (round >= options.rounds || cuts.empty()) {
      res.status = SeparationStatus::RefinementExhausted;
      return res;
    }
    for (const auto& x : cuts) add_point(x);
  }
}

std::string serialize_certificate(const Certificate& certificate) {
  char buf[64];
  std::string out = "alpha = [";
  for (std::size_t i = 0; i < certificate.alpha.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", certificate.alpha[i]);
    if (i) out += ", ";
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", certificate.lambda_min);
  out += "]\nlambda_min = ";
  out += buf;
  out += "\nverified = ";
  out += to_string(certificate.verified);
  out += "\n";
  return out;
}

}  // namespace sproc
