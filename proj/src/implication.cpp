#include "sproc/implication.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "sproc/descent.hpp"
#include "sproc/error.hpp"
#include "sproc/linprog.hpp"
#include "sproc/rng.hpp"

namespace sproc {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ValidWithCertificate:
      return "ValidWithCertificate";
    case Verdict::InvalidWithCounterexample:
      return "InvalidWithCounterexample";
    case Verdict::Undetermined:
      return "Undetermined";
  }
  return "?";
}

std::uint64_t stage_seed(std::uint64_t seed, Stage stage) {
  return derive_seed(seed, static_cast<std::uint64_t>(stage));
}

bool is_counterexample(std::span<const double> values) {
  if (values.empty() || !(values[0] < -kCounterexampleTol)) return false;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] >= -kCounterexampleTol)) return false;
  return true;
}

bool InstanceReport::numerical_failure() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [](const StageDiagnostic& d) { return d.numerical; });
}

namespace {

double min_constraint(const Vector& values) {
  double m = kInf;
  for (std::size_t i = 1; i < values.size(); ++i) m = std::min(m, values[i]);
  return m;
}

std::optional<Vector> try_values(const FunctionSystem& system, std::span<const double> x) {
  try {
    Vector v = system.values(x);
    for (double f : v)
      if (!std::isfinite(f)) return std::nullopt;
    return v;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

/// Levenberg-Marquardt on r_i = max(0, target - fi(x)), driving every constraint above target.
Vector push_feasible(const FunctionSystem& system, Vector x, double target, int iters) {
  const std::size_t p = system.num_constraints();
  ResidualFn residual = [&](std::span<const double> y) {
    Vector r(p);
    for (std::size_t i = 0; i < p; ++i) r[i] = std::max(0.0, target - system.function(i + 1)(y));
    return r;
  };
  JacobianFn jacobian = [&](std::span<const double> y) {
    Matrix j(p, y.size());
    for (std::size_t i = 0; i < p; ++i) {
      if (target - system.function(i + 1)(y) <= 0.0) continue;
      const Vector g = system.function(i + 1).gradient(y);
      for (std::size_t k = 0; k < y.size(); ++k) j(i, k) = -g[k];
    }
    return j;
  };
  try {
    return least_squares(residual, jacobian, x, iters, 0.0).x;
  } catch (const DomainError&) {
    return x;
  }
}

}  // namespace

SlaterResult check_slater(const FunctionSystem& system, double radius, std::size_t samples, std::uint64_t seed) {
  SlaterResult res;
  const std::size_t n = system.dim();
  if (system.num_constraints() == 0) {
    res.found = true;
    res.x0.assign(n, 0.0);
    res.min_constraint_value = kInf;
    return res;
  }
  SplitMix64 rng(seed);
  std::vector<std::pair<double, Vector>> seen;
  Vector x(n);
  for (std::size_t k = 0; k < samples; ++k) {
    rng.fill_box(x, radius);
    if (auto v = try_values(system, x)) seen.emplace_back(min_constraint(*v), x);
  }
  res.min_constraint_value = -kInf;
  auto consider = [&](const Vector& y) {
    const auto v = try_values(system, y);
    if (!v) return false;
    const double m = min_constraint(*v);
    if (m > res.min_constraint_value) {
      res.min_constraint_value = m;
      res.x0 = y;
    }
    return m > kSlaterTol;
  };
  if (seen.empty()) {
    res.x0.assign(n, 0.0);
    consider(res.x0);
    res.found = res.min_constraint_value > kSlaterTol;
    return res;
  }
  const std::size_t keep = std::min<std::size_t>(5, seen.size());
  std::partial_sort(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(keep), seen.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  if (consider(seen.front().second)) {
    res.found = true;
    return res;
  }
  for (double tau : {1.0, 1e-3, 1e-6}) {
    for (std::size_t k = 0; k < keep; ++k) {
      if (consider(push_feasible(system, seen[k].second, tau, 100))) {
        res.found = true;
        return res;
      }
    }
  }
  return res;
}

CounterexampleResult find_counterexample(const FunctionSystem& system, const CounterexampleOptions& options) {
  const std::size_t n = system.dim();
  const std::size_t p = system.num_constraints();
  CounterexampleResult res;
  res.closest_f0 = kInf;

  auto record = [&](const Vector& x, const Vector& v) {
    bool feasible = true;
    for (std::size_t i = 1; i <= p; ++i) feasible = feasible && v[i] >= -kCounterexampleTol;
    if (feasible && v[0] < res.closest_f0) {
      res.closest_f0 = v[0];
      res.closest_miss = x;
    }
    if (is_counterexample(v) && (!res.found || v[0] < res.values[0])) {
      res.found = true;
      res.x = x;
      res.values = v;
    }
  };

  const double w = options.penalty;
  auto penalized = [&](const Vector& v) {
    double s = v[0];
    for (std::size_t i = 1; i <= p; ++i) {
      const double h = std::max(0.0, -v[i]);
      s += w * h * h;
    }
    return s;
  };

  SplitMix64 rng(options.seed);
  std::vector<std::pair<double, Vector>> starts;
  Vector x(n);
  for (std::size_t k = 0; k < options.samples; ++k) {
    rng.fill_box(x, options.radius);
    const auto v = try_values(system, x);
    if (!v) {
      ++res.skipped;
      continue;
    }
    record(x, *v);
    starts.emplace_back(penalized(*v), x);
  }
  if (res.found) return res;

  ScalarFn f = [&](std::span<const double> y) {
    const auto v = try_values(system, y);
    return v ? penalized(*v) : kInf;
  };
  GradientFn g = [&](std::span<const double> y) {
    Vector grad = system.objective().gradient(y);
    for (std::size_t i = 1; i <= p; ++i) {
      const double fi = system.function(i)(y);
      if (fi >= 0.0) continue;
      const Vector gi = system.function(i).gradient(y);
      for (std::size_t k = 0; k < n; ++k) grad[k] += 2.0 * w * fi * gi[k];
    }
    return grad;
  };
  auto stop = [&](std::span<const double> y, double value) {
    if (value < -1e12) return true;
    const auto v = try_values(system, y);
    return v && is_counterexample(*v);
  };

  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.starts, 0)), starts.size());
  std::partial_sort(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(keep), starts.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < keep && !res.found; ++k) {
    Vector y;
    try {
      y = minimize_bfgs(f, g, starts[k].second, options.refine_iters, stop).x;
    } catch (const DomainError&) {
      continue;
    }
    auto v = try_values(system, y);
    if (!v) continue;
    if (!is_counterexample(*v) && p > 0 && min_constraint(*v) < 0.0) {
      y = push_feasible(system, y, 1e-10, 60);
      v = try_values(system, y);
      if (!v) continue;
    }
    record(y, *v);
  }
  return res;
}

namespace {

struct StageGuard {
  InstanceReport& report;

  template <class F>
  bool run(const char* stage, F&& body) {
    try {
      body();
      return true;
    } catch (const NotConverged& e) {
      report.diagnostics.push_back({stage, e.what(), true});
    } catch (const NumericalBreakdown& e) {
      report.diagnostics.push_back({stage, e.what(), true});
    } catch (const Error& e) {
      report.diagnostics.push_back({stage, e.what(), false});
    }
    return false;
  }
};

}  // namespace

InstanceReport classify_instance(const FunctionSystem& system, const ClassifyConfig& config) {
  InstanceReport report;
  report.config = config;
  StageGuard guard{report};
  const std::size_t p = system.num_constraints();

  guard.run("slater", [&] {
    report.slater = check_slater(system, config.radius, config.samples, stage_seed(config.seed, Stage::Slater));
  });

  guard.run("counterexample", [&] {
    CounterexampleOptions co;
    co.radius = config.radius;
    co.samples = config.samples;
    co.seed = stage_seed(config.seed, Stage::Counterexample);
    co.refine_iters = config.refine_iters;
    co.penalty = config.penalty;
    report.counterexample = find_counterexample(system, co);
  });
  if (report.counterexample.found) {
    const Vector z = system.image(report.counterexample.x);
    if (!cone_k_member(z, kCounterexampleTol)) {
      report.diagnostics.push_back({"counterexample", "image point failed the K membership re-check", false});
    } else {
      report.verdict = Verdict::InvalidWithCounterexample;
      return report;
    }
  }

  report.certificate_searched = true;
  if (system.all_quadratic()) {
    guard.run("certificate", [&] {
      CertificateSearch search;
      if (p == 0) {
        report.certificate_method = "psd";
        const QuadraticVerification v = verify_certificate_quadratic(system, Vector{}, config.tol);
        search.found = v.valid;
        search.certificate.lambda_min = v.lambda_min;
        search.certificate.verified = v.valid ? Verification::ExactPSD : Verification::Failed;
      } else if (system.all_affine()) {
        report.certificate_method = "affine-lp";
        search = find_certificate_affine(system, config.tol);
      } else if (p == 1) {
        report.certificate_method = "p1";
        search = find_certificate_p1(system, config.alpha_max, config.tol);
      } else {
        report.certificate_method = "supergradient";
        search = find_certificate_general(system, config.supergradient_iters, config.seed, config.tol);
      }
      report.quadratic_search = search;
      if (search.found) report.certificate = search.certificate;
    });
  }

  if (!report.certificate) {
    guard.run("separation", [&] {
      const ImageCloud cloud =
          sample_image(system, config.radius, config.samples, stage_seed(config.seed, Stage::Separation));
      SeparationOptions so;
      so.lp_tol = config.lp_tol;
      so.psd_tol = config.tol;
      so.rounds = config.separation_rounds;
      so.radius = config.radius;
      so.verify_samples = config.samples;
      so.seed = stage_seed(config.seed, Stage::Verification);
      report.separation = find_certificate_via_separation(system, cloud, so);
      if (report.separation->status == SeparationStatus::Found) report.certificate = report.separation->certificate;
    });
  }

  if (report.certificate && report.certificate->verified == Verification::ExactPSD) {
    // Re-verify from scratch; (C) and a counterexample cannot coexist.
    const QuadraticVerification v = verify_certificate_quadratic(system, report.certificate->alpha, config.tol);
    if (v.valid && !report.counterexample.found) {
      report.verdict = Verdict::ValidWithCertificate;
      return report;
    }
    report.diagnostics.push_back({"certificate", "certificate failed re-verification", false});
    report.certificate->verified = Verification::Failed;
  }

  guard.run("geometry", [&] {
    EvidenceOptions eo;
    eo.radius = config.radius;
    eo.samples = config.geometry_samples;
    eo.seed = stage_seed(config.seed, Stage::Geometry);
    eo.lp_tol = config.lp_tol;
    eo.trials = config.falsify_trials;
    eo.conical_trials = config.conical_trials;
    eo.identity = false;
    report.geometry = collect_geometry_evidence(system, eo);
  });
  return report;
}

}  // namespace sproc
