#include "sproc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sproc/descent.hpp"
#include "sproc/error.hpp"
#include "sproc/linprog.hpp"
#include "sproc/rng.hpp"

namespace sproc {

ImageCloud sample_image(const FunctionSystem& system, double radius, std::size_t count, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidArgument("box radius must be positive");
  if (count == 0) throw InvalidArgument("sample count must be at least 1");
  ImageCloud cloud;
  cloud.box_radius = radius;
  cloud.seed = seed;
  cloud.points.reserve(count);
  cloud.sources.reserve(count);
  SplitMix64 rng(seed);
  Vector x(system.dim());
  while (cloud.size() < count) {
    rng.fill_box(x, radius);
    try {
      cloud.add(x, system.image(x));
    } catch (const DomainError&) {
      if (++cloud.skipped > count)
        throw SamplingError("more than half of the sampled points fall outside the functions' domain");
    }
  }
  return cloud;
}

bool cone_k_member(std::span<const double> z, double strict_tol) {
  if (z.empty() || !(z[0] < -strict_tol)) return false;
  for (std::size_t i = 1; i < z.size(); ++i)
    if (z[i] > strict_tol) return false;
  return true;
}

HullTest hull_intersects_k(const ImageCloud& cloud, double tol) {
  if (cloud.size() == 0) throw InvalidArgument("empty image cloud");
  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.image_dim();
  LinearProgram lp(n);
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = cloud.points[j][0];
  for (std::size_t i = 1; i < dim; ++i) {
    Vector row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = cloud.points[j][i];
    lp.add_inequality(std::move(row), 0.0);
  }
  lp.add_equality(Vector(n, 1.0), 1.0);
  const LpOutcome out = solve_lp(lp);

  HullTest res;
  if (out.status == LpStatus::Unbounded) throw NumericalBreakdown("hull LP reported unbounded");
  if (out.status == LpStatus::Infeasible) return res;
  res.feasible = true;
  res.optimum = out.objective;
  res.weights = out.solution;
  res.witness.assign(dim, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    if (res.weights[j] != 0.0)
      for (std::size_t i = 0; i < dim; ++i) res.witness[i] += res.weights[j] * cloud.points[j][i];
  res.intersects = out.objective < -tol;
  return res;
}

SeparatorSearch extract_separator(const ImageCloud& cloud, double tol) {
  if (cloud.size() == 0) throw InvalidArgument("empty image cloud");
  const std::size_t dim = cloud.image_dim();
  const std::size_t delta = dim;  // variable index of delta
  LinearProgram lp(dim + 1);
  lp.set_free(delta);
  lp.objective[delta] = -1.0;
  for (const auto& z : cloud.points) {
    Vector row(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) row[i] = -z[i];
    row[delta] = 1.0;
    lp.add_inequality(std::move(row), 0.0);
  }
  Vector sum(dim + 1, 1.0);
  sum[delta] = 0.0;
  lp.add_equality(std::move(sum), 1.0);
  const LpOutcome out = solve_lp(lp);
  if (out.status != LpStatus::Optimal) throw NumericalBreakdown("separator LP is not optimal");

  SeparatorSearch res;
  res.best.alpha.assign(out.solution.begin(), out.solution.begin() + static_cast<std::ptrdiff_t>(dim));
  for (double& a : res.best.alpha) a = std::max(0.0, a);
  double total = 0.0;
  for (double a : res.best.alpha) total += a;
  for (double& a : res.best.alpha) a /= total;
  res.best.delta = out.solution[delta];
  if (res.best.delta >= -tol) {
    res.separator = res.best;
  } else {
    res.witness = hull_intersects_k(cloud, tol);
  }
  return res;
}

std::string_view to_string(ConvexifierKind kind) {
  return kind == ConvexifierKind::ZeroSet ? "ZeroSet" : "PositiveOrthant";
}

namespace {

enum class Target { Epi, Identity };

double shortfall(Target mode, std::span<const double> z, std::span<const double> m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = z[i] - m[i];
    worst = std::max(worst, mode == Target::Epi ? d : std::abs(d));
  }
  return worst;
}

MembershipResult search_member(const FunctionSystem& system, std::span<const double> target,
                               const MembershipOptions& options, std::span<const Vector> hints, Target mode) {
  if (target.size() != system.num_constraints() + 1) throw DimensionMismatch("membership target has the wrong size");
  const Vector m(target.begin(), target.end());
  // Aim slightly inside the epi-image so the hinge residual can reach exactly zero.
  const double aim = mode == Target::Epi ? 0.1 * options.accept_tol : 0.0;

  ResidualFn residual = [&](std::span<const double> x) {
    Vector z = system.image(x);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double d = z[i] - m[i];
      z[i] = mode == Target::Epi ? std::max(0.0, d + aim) : d;
    }
    return z;
  };
  JacobianFn jacobian = [&](std::span<const double> x) {
    Matrix j = system.image_jacobian(x);
    if (mode == Target::Epi) {
      const Vector z = system.image(x);
      for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] - m[i] + aim <= 0.0)
          for (std::size_t k = 0; k < j.cols(); ++k) j(i, k) = 0.0;
    }
    return j;
  };

  MembershipResult res;
  res.margin = kInf;
  SplitMix64 rng(options.seed);
  Vector start(system.dim());
  const std::size_t total = hints.size() + static_cast<std::size_t>(std::max(0, options.restarts));
  for (std::size_t k = 0; k < total; ++k) {
    if (k < hints.size()) {
      start = hints[k];
    } else {
      rng.fill_box(start, options.radius);
    }
    auto check = [&](const Vector& x) {
      try {
        const double s = shortfall(mode, system.image(x), m);
        res.margin = std::min(res.margin, s);
        if (s <= options.accept_tol) {
          res.member = true;
          res.x = x;
          res.margin = 0.0;
        }
      } catch (const DomainError&) {
      }
      return res.member;
    };
    if (check(start)) return res;
    const LocalResult local = least_squares(residual, jacobian, start, options.iterations);
    if (check(local.x)) return res;
  }
  return res;
}

}  // namespace

MembershipResult epi_member(const FunctionSystem& system, std::span<const double> target,
                            const MembershipOptions& options, std::span<const Vector> hints) {
  return search_member(system, target, options, hints, Target::Epi);
}

MembershipResult identity_member(const FunctionSystem& system, std::span<const double> target,
                                 const MembershipOptions& options, std::span<const Vector> hints) {
  return search_member(system, target, options, hints, Target::Identity);
}

MembershipOracle make_membership_oracle(const FunctionSystem& system, ConvexifierKind kind, MembershipOptions options,
                                        const ImageCloud* cloud) {
  return [&system, kind, options, cloud](std::span<const double> m, std::span<const Vector> hints) {
    if (cloud != nullptr) {
      for (std::size_t j = 0; j < cloud->size(); ++j) {
        const Vector& z = cloud->points[j];
        const double s = shortfall(kind == ConvexifierKind::PositiveOrthant ? Target::Epi : Target::Identity, z, m);
        if (s <= options.accept_tol) return MembershipResult{true, cloud->sources[j], 0.0};
      }
    }
    return kind == ConvexifierKind::PositiveOrthant ? epi_member(system, m, options, hints)
                                                    : identity_member(system, m, options, hints);
  };
}

MembershipOracle make_conical_oracle(MembershipOracle base) {
  return [base = std::move(base)](std::span<const double> m, std::span<const Vector> hints) {
    if (norm_inf(m) == 0.0) return MembershipResult{true, {}, 0.0};
    MembershipResult best;
    best.margin = kInf;
    Vector scaled(m.size());
    for (int k = 0; k < kConicalGridSize; ++k) {
      const double s = std::pow(10.0, -3.0 + 6.0 * k / (kConicalGridSize - 1));
      for (std::size_t i = 0; i < m.size(); ++i) scaled[i] = m[i] / s;
      MembershipResult r = base(scaled, hints);
      if (r.member) return r;
      best.margin = std::min(best.margin, s * r.margin);
    }
    return best;
  };
}

FalsificationResult falsify_convexity(const MembershipOracle& member, const ImageCloud& cloud, int trials,
                                      std::uint64_t seed, double eta) {
  if (trials < 1) throw InvalidArgument("falsification needs at least one trial");
  FalsificationResult res;
  if (cloud.size() < 2) {
    res.trials = trials;
    return res;
  }
  SplitMix64 rng(seed);
  const std::size_t dim = cloud.image_dim();
  Vector m(dim);
  for (int trial = 0; trial < trials; ++trial) {
    res.trials = trial + 1;
    const std::size_t a = rng.below(cloud.size());
    std::size_t b = rng.below(cloud.size() - 1);
    if (b >= a) ++b;
    const Vector& z1 = cloud.points[a];
    const Vector& z2 = cloud.points[b];
    if (z1 == z2) continue;
    for (double t : kChordWeights) {
      for (std::size_t i = 0; i < dim; ++i) m[i] = t * z1[i] + (1.0 - t) * z2[i];
      Vector mid(cloud.sources[a].size());
      for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = t * cloud.sources[a][i] + (1.0 - t) * cloud.sources[b][i];
      const std::vector<Vector> hints{mid, cloud.sources[a], cloud.sources[b]};
      ++res.queries;
      const MembershipResult r = member(m, hints);
      if (r.member) continue;
      res.max_margin = std::max(res.max_margin, r.margin);
      if (!(r.margin > eta)) continue;
      const std::vector<Vector> h1{cloud.sources[a]};
      const std::vector<Vector> h2{cloud.sources[b]};
      if (!member(z1, h1).member || !member(z2, h2).member) continue;
      res.violation = ConvexityViolation{z1, z2, t, m, trial + 1, r.margin};
      return res;
    }
  }
  return res;
}

QuadraticFunction random_quadratic(std::size_t dim, SplitMix64& rng) {
  Matrix q(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      const double v = rng.normal();
      q(i, j) = v;
      q(j, i) = v;
    }
  Vector c(dim);
  for (double& v : c) v = rng.normal();
  return QuadraticFunction(std::move(q), std::move(c), rng.normal());
}

std::size_t ScanReport::candidates() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const ScanEntry& e) { return e.result.violation.has_value(); }));
}

ScanEntry scan_triple(const std::vector<QuadraticFunction>& triple, const ScanOptions& options, std::uint64_t seed) {
  if (triple.empty()) throw InvalidArgument("scan needs at least one function");
  // z = (f0, -f1, -f2) = (q1, q2, q3) with f0 = q1, f1 = -q2, f2 = -q3.
  std::vector<Function> rest;
  for (std::size_t i = 1; i < triple.size(); ++i) rest.emplace_back(triple[i].scaled(-1.0));
  const FunctionSystem system(Function(triple.front()), std::move(rest));
  const ImageCloud cloud = sample_image(system, options.radius, options.samples, derive_seed(seed, 1));
  MembershipOptions mo = options.membership;
  mo.radius = options.radius;
  mo.seed = derive_seed(seed, 2);
  const MembershipOracle oracle = make_membership_oracle(system, ConvexifierKind::PositiveOrthant, mo, &cloud);
  ScanEntry entry;
  entry.seed = seed;
  entry.triple = triple;
  entry.result = falsify_convexity(oracle, cloud, options.trials, derive_seed(seed, 3), options.eta);
  return entry;
}

ScanReport conjecture_scan(std::size_t count, std::size_t dim, std::uint64_t seed, const ScanOptions& options) {
  if (count < 1) throw InvalidArgument("conjecture scan needs count >= 1");
  if (dim < 2) throw InvalidArgument("conjecture scan needs dimension >= 2");
  ScanReport report{count, dim, seed, options, {}};
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t instance_seed = derive_seed(seed, 100 + k);
    SplitMix64 rng(instance_seed);
    std::vector<QuadraticFunction> triple;
    for (int i = 0; i < 3; ++i) triple.push_back(random_quadratic(dim, rng));
    ScanEntry entry = scan_triple(triple, options, instance_seed);
    entry.index = k;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

GeometryEvidence collect_geometry_evidence(const FunctionSystem& system, const EvidenceOptions& options,
                                           ImageCloud* cloud_out) {
  const ImageCloud cloud = sample_image(system, options.radius, options.samples, derive_seed(options.seed, 1));
  GeometryEvidence ev;
  ev.radius = options.radius;
  ev.seed = options.seed;
  ev.cloud_size = cloud.size();
  ev.skipped = cloud.skipped;
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (!cone_k_member(cloud.points[j], 0.0)) continue;
    if (ev.k_points++ == 0) ev.k_witness = cloud.sources[j];
  }
  ev.hull = hull_intersects_k(cloud, options.lp_tol);
  ev.separator = extract_separator(cloud, options.lp_tol);

  MembershipOptions mo = options.membership;
  mo.radius = options.radius;
  mo.seed = derive_seed(options.seed, 2);
  if (options.identity) {
    const auto oracle = make_membership_oracle(system, ConvexifierKind::ZeroSet, mo, &cloud);
    ev.identity = falsify_convexity(oracle, cloud, options.trials, derive_seed(options.seed, 3), options.eta);
  }
  if (options.epi) {
    const auto oracle = make_membership_oracle(system, ConvexifierKind::PositiveOrthant, mo, &cloud);
    ev.epi = falsify_convexity(oracle, cloud, options.trials, derive_seed(options.seed, 4), options.eta);
  }
  if (options.conical) {
    const auto oracle = make_conical_oracle(make_membership_oracle(system, ConvexifierKind::ZeroSet, mo, &cloud));
    ev.conical = falsify_convexity(oracle, cloud, options.conical_trials, derive_seed(options.seed, 5), options.eta);
  }
  if (cloud_out != nullptr) *cloud_out = cloud;
  return ev;
}

void export_cloud(const ImageCloud& cloud, std::ostream& out) {
  const std::size_t p = cloud.image_dim() == 0 ? 0 : cloud.image_dim() - 1;
  const std::size_t n = cloud.sources.empty() ? 0 : cloud.sources.front().size();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cloud.box_radius);
  out << "# p=" << p << " n=" << n << " R=" << buf << " seed=" << cloud.seed << " N=" << cloud.size() << "\n";
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    bool first = true;
    auto put = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      if (!first) out << ' ';
      out << buf;
      first = false;
    };
    for (double v : cloud.points[j]) put(v);
    for (double v : cloud.sources[j]) put(v);
    out << "\n";
  }
}

}  // namespace sproc
