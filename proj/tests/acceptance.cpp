// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sproc/certificate.hpp"
#include "sproc/error.hpp"
#include "sproc/farkas.hpp"
#include "sproc/geometry.hpp"
#include "sproc/implication.hpp"
#include "sproc/linprog.hpp"
#include "sproc/problem.hpp"
#include "sproc/quadratic.hpp"
#include "sproc/rng.hpp"

using namespace sproc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const bool g_verbose = std::getenv("SPROC_ACCEPTANCE_VERBOSE") != nullptr;

std::string vec(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str() + ']';
}

void describe(const FunctionSystem& s) {
  for (const auto& q : s.quadratics()) {
    std::cerr << "    Q=";
    for (std::size_t i = 0; i < q.dim(); ++i) std::cerr << vec(q.Q().row(i));
    std::cerr << " c=" << vec(q.c()) << " d=" << q.d() << "\n";
  }
}

/// fi(x) >= 0 for i >= 1 and f0(x) < -1e-6, evaluated without sproc::QuadraticFunction.
bool raw_counterexample(const FunctionSystem& s, const Vector& x) {
  const auto qs = oracle::raw(s);
  if (x.size() != s.dim() || !(qs[0](x) < -1e-6)) return false;
  for (std::size_t i = 1; i < qs.size(); ++i)
    if (qs[i](x) < 0.0) return false;
  return true;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome example3_reproduction() {
  const FunctionSystem s = load_problem(SPROC_CORPUS_DIR "/example3_pair.json").system();
  const ImageCloud cloud = sample_image(s, 10.0, 4096, 1);

  std::size_t below = 0;
  for (const auto& z : cloud.points) {
    const double u = z[0], v = -z[1];
    if (u < -2.0 * v * v - 1e-9) ++below;
  }

  const auto identity = make_membership_oracle(s, ConvexifierKind::ZeroSet, {}, &cloud);
  const FalsificationResult fi = falsify_convexity(identity, cloud, 2000, derive_seed(1, 11));
  const auto epi = make_membership_oracle(s, ConvexifierKind::PositiveOrthant, {}, &cloud);
  const FalsificationResult fe = falsify_convexity(epi, cloud, 2000, derive_seed(1, 12));

  SplitMix64 rng(derive_seed(1, 13));
  int members = 0;
  MembershipOptions mo;
  mo.seed = derive_seed(1, 14);
  for (int k = 0; k < 50; ++k) {
    const Vector m = {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
    if (epi_member(s, m, mo).member) ++members;
  }

  Outcome o;
  o.pass = below == 0 && fi.violation.has_value() && !fe.violation && members == 50;
  o.detail = "(a) " + std::to_string(below) + "/4096 below u=-2v^2; (b) identity violation " +
             (fi.violation ? "after " + std::to_string(fi.trials) + " trials" : std::string("not found")) +
             "; (c) epi violations " + (fe.violation ? "1" : "0") + " in " + std::to_string(fe.trials) +
             " trials; (d) epi_member " + std::to_string(members) + "/50";
  return o;
}

// ---------------------------------------------------------------------------

struct P1Instance {
  FunctionSystem system;
  InstanceReport report;
};

std::vector<P1Instance> g_p1_instances;

FunctionSystem random_p1_instance(SplitMix64& rng, int index) {
  const std::size_t n = 1 + rng.below(4);
  const QuadraticFunction f1 = oracle::random_normal_quadratic(n, rng);
  if (index % 2 == 0) return FunctionSystem(oracle::random_normal_quadratic(n, rng), {f1});
  // f0 = alpha f1 + sigma with sigma >= 0 everywhere: (C) holds by construction.
  const double alpha = rng.uniform(0.1, 3.0);
  const QuadraticFunction sigma = oracle::random_positive_quadratic(n, rng, rng.uniform(0.0, 0.5));
  Matrix q = f1.Q();
  Vector c = f1.c();
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = alpha * c[i] + sigma.c()[i];
    for (std::size_t j = 0; j < n; ++j) q(i, j) = alpha * q(i, j) + sigma.Q()(i, j);
  }
  return FunctionSystem(QuadraticFunction(q, c, alpha * f1.d() + sigma.d()), {f1});
}

Outcome p1_consistency() {
  SplitMix64 rng(derive_seed(2, 1));
  int definitive = 0, disagree = 0, both = 0, drawn = 0, grid_misses = 0;
  std::string first_disagreement;
  while (g_p1_instances.size() < 200) {
    FunctionSystem s = random_p1_instance(rng, drawn++);
    if (!check_slater(s, 10.0, 4096, derive_seed(2, 1000 + drawn)).found) continue;
    ClassifyConfig cfg;
    cfg.seed = derive_seed(2, 2000 + drawn);
    InstanceReport r = classify_instance(s, cfg);
    if (r.counterexample.found && r.certificate && r.certificate->verified == Verification::ExactPSD) ++both;
    if (r.verdict != Verdict::Undetermined) {
      ++definitive;
      const bool grid_holds = oracle::grid_adjudicate(oracle::raw(s)).verdict == oracle::GridVerdict::Holds;
      if (grid_holds != (r.verdict == Verdict::ValidWithCertificate)) {
        ++disagree;
        if (grid_holds && raw_counterexample(s, r.counterexample.x)) ++grid_misses;
        if (g_verbose) {
          std::cerr << "  draw " << drawn << ": verdict " << to_string(r.verdict) << ", grid "
                    << (grid_holds ? "holds" : "violated") << ", x " << vec(r.counterexample.x) << " values "
                    << vec(r.counterexample.values) << "\n";
          describe(s);
        }
        if (first_disagreement.empty()) first_disagreement = "; first disagreement at draw " + std::to_string(drawn);
      }
    }
    g_p1_instances.push_back({std::move(s), std::move(r)});
  }
  Outcome o;
  o.pass = definitive >= 190 && disagree == 0 && both == 0;
  o.detail = std::to_string(definitive) + "/200 definitive (" + std::to_string(drawn) + " drawn), " +
             std::to_string(disagree) + " grid disagreements, " + std::to_string(both) +
             " with certificate and counterexample" + first_disagreement;
  if (disagree > 0)
    o.detail += "; " + std::to_string(grid_misses) + "/" + std::to_string(disagree) +
                " disagreements carry a raw-verified counterexample between grid points";
  return o;
}

// ---------------------------------------------------------------------------

Outcome certificate_soundness() {
  int checked = 0, violated = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < g_p1_instances.size(); ++k) {
    const auto& inst = g_p1_instances[k];
    if (!inst.report.certificate || inst.report.certificate->verified != Verification::ExactPSD) continue;
    ++checked;
    CounterexampleOptions co;
    co.samples = 100000;
    co.seed = derive_seed(3, k);
    const CounterexampleResult r = find_counterexample(inst.system, co);
    if (r.found) {
      worst = std::min(worst, r.values[0]);
      if (r.values[0] < -1e-6) ++violated;
    }
  }
  Outcome o;
  o.pass = checked > 0 && violated == 0;
  o.detail = std::to_string(checked) + " certificates re-searched with 1e5 samples, " + std::to_string(violated) +
             " with f0 < -1e-6 on the feasible set (lowest f0 seen " + fmt("%.3g", worst) + ")";
  return o;
}

// ---------------------------------------------------------------------------

Outcome separation_pipeline() {
  SplitMix64 rng(derive_seed(4, 1));
  int instances = 0, found = 0, false_found = 0, other = 0, blocked = 0, exhausted = 0, grid_misses = 0;
  while (instances < 50) {
    const std::size_t n = 1 + rng.below(3);
    Vector c0(n), c1(n);
    for (auto& v : c0) v = rng.normal();
    for (auto& v : c1) v = 0.5 * rng.normal();
    const FunctionSystem s(QuadraticFunction(oracle::random_psd(n, rng, 0.1), c0, rng.uniform(0.5, 5.0)),
                           {QuadraticFunction(-1.0 * oracle::random_psd(n, rng, 0.1), c1, rng.uniform(0.5, 2.0))});
    if (!check_slater(s, 10.0, 1024, derive_seed(4, 100 + instances)).found) continue;
    if (oracle::grid_adjudicate(oracle::raw(s)).verdict != oracle::GridVerdict::Holds) continue;
    ++instances;
    const ImageCloud cloud = sample_image(s, 10.0, 1024, derive_seed(4, 200 + instances));
    SeparationOptions so;
    so.seed = derive_seed(4, 300 + instances);
    const SeparationSearch r = find_certificate_via_separation(s, cloud, so);
    switch (r.status) {
      case SeparationStatus::Found:
        if (r.certificate.verified == Verification::ExactPSD && verify_certificate_quadratic(s, r.certificate.alpha).valid)
          ++found;
        else
          ++false_found;
        break;
      case SeparationStatus::SlaterBlocked: ++blocked; break;
      case SeparationStatus::RefinementExhausted: ++exhausted; break;
      default: {
        ++other;
        CounterexampleOptions co;
        co.seed = derive_seed(4, 400 + instances);
        const CounterexampleResult cx = find_counterexample(s, co);
        if (cx.found && raw_counterexample(s, cx.x)) ++grid_misses;
        if (g_verbose) {
          std::cerr << "  separation instance " << instances << ": " << to_string(r.status) << "\n";
          describe(s);
        }
        break;
      }
    }
  }
  Outcome o;
  o.pass = found >= 45 && false_found == 0 && other == 0;
  o.detail = std::to_string(found) + "/50 Found+ExactPSD, " + std::to_string(blocked) + " SlaterBlocked, " +
             std::to_string(exhausted) + " RefinementExhausted, " + std::to_string(other) + " other, " +
             std::to_string(false_found) + " false Found";
  if (other > 0)
    o.detail += "; " + std::to_string(grid_misses) + "/" + std::to_string(other) +
                " other-status instances violate (I) at a raw-verified point between grid points";
  return o;
}

// ---------------------------------------------------------------------------

Outcome lp_engine() {
  SplitMix64 rng(derive_seed(5, 1));
  int status_mismatch = 0, value_mismatch = 0, optimal = 0;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const LinearProgram lp = oracle::random_lp(rng);
    const LpOutcome r = solve_lp(lp);
    const oracle::VertexResult ref = oracle::enumerate_vertices(lp);
    const bool ours = r.status == LpStatus::Optimal;
    if (r.status == LpStatus::Unbounded || ours != ref.feasible) {
      ++status_mismatch;
      continue;
    }
    if (!ours) continue;
    ++optimal;
    const double err = std::abs(r.objective - ref.objective);
    worst = std::max(worst, err);
    if (err > 1e-7) ++value_mismatch;
  }
  Outcome o;
  o.pass = status_mismatch == 0 && value_mismatch == 0;
  o.detail = "500 LPs (" + std::to_string(optimal) + " optimal): " + std::to_string(status_mismatch) +
             " status mismatches, " + std::to_string(value_mismatch) + " objective mismatches > 1e-7 (max error " +
             fmt("%.2e", worst) + ")";
  return o;
}

// ---------------------------------------------------------------------------

Outcome eigensolver() {
  SplitMix64 rng(derive_seed(6, 1));
  int failures = 0;
  double worst_rec = 0.0, worst_closed = 0.0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + rng.below(10);
    const Matrix a = oracle::random_symmetric(n, rng, rng.uniform(0.1, 100.0));
    const SymmetricEigen e = eigen_sym(a);
    const double scale = 1.0 + a.max_abs();
    double rec = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += e.eigenvectors(i, l) * e.eigenvalues[l] * e.eigenvectors(j, l);
        rec = std::max(rec, std::abs(s - a(i, j)));
      }
    worst_rec = std::max(worst_rec, rec / scale);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i);
    const double sum = std::accumulate(e.eigenvalues.begin(), e.eigenvalues.end(), 0.0);
    const bool sorted = std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end());
    if (rec > 1e-8 * scale || std::abs(sum - trace) > 1e-9 * (1.0 + std::abs(trace)) || !sorted) ++failures;
  }
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 + k % 2;
    const Matrix a = oracle::random_symmetric(n, rng, rng.uniform(0.1, 10.0));
    const Vector ref = n == 2 ? oracle::eig2(a(0, 0), a(0, 1), a(1, 1)) : oracle::eig3(a);
    const Vector got = eigen_sym(a).eigenvalues;
    for (std::size_t i = 0; i < n; ++i) {
      const double err = std::abs(got[i] - ref[i]);
      worst_closed = std::max(worst_closed, err);
      if (err > 1e-10) ++failures;
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = "500 random n<=10 and 500 closed-form 2x2/3x3: " + std::to_string(failures) +
             " failures (max scaled reconstruction " + fmt("%.2e", worst_rec) + ", max closed-form error " +
             fmt("%.2e", worst_closed) + ")";
  return o;
}

// ---------------------------------------------------------------------------

Vector normalized(const Vector& v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  Vector out = v;
  if (s > 0.0)
    for (double& x : out) x /= s;
  return out;
}

Outcome farkas_agreement() {
  SplitMix64 rng(derive_seed(7, 1));
  int verdict_mismatch = 0, alpha_mismatch = 0, valid = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + rng.below(3);
    const std::size_t p = 1 + rng.below(n);
    LinearSystemData d;
    d.mode = k % 2 ? LinearSystemData::Mode::Affine : LinearSystemData::Mode::Homogeneous;
    d.rows.assign(p, Vector(n));
    d.b.assign(p, 0.0);
    for (auto& r : d.rows)
      for (double& v : r) v = rng.normal();
    if (d.mode == LinearSystemData::Mode::Affine)
      for (double& v : d.b) v = rng.normal();
    d.a0.assign(n, 0.0);
    if (rng.below(2) == 0) {
      Vector alpha(p);
      for (double& a : alpha) a = rng.uniform(0.1, 2.0);
      double rhs = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        rhs += alpha[i] * d.b[i];
        for (std::size_t j = 0; j < n; ++j) d.a0[j] += alpha[i] * d.rows[i][j];
      }
      if (d.mode == LinearSystemData::Mode::Affine) d.b0 = rhs + (rng.below(3) == 0 ? 0.5 : -rng.uniform(0.0, 1.0));
    } else {
      for (double& v : d.a0) v = rng.normal();
      if (d.mode == LinearSystemData::Mode::Affine) d.b0 = rng.normal();
    }

    const FarkasResult fr = farkas_solve(d);
    ClassifyConfig cfg;
    cfg.seed = derive_seed(7, 100 + k);
    const InstanceReport ir = classify_instance(to_function_system(d), cfg);
    const bool farkas_valid = fr.kind == FarkasResult::Kind::Multipliers;
    const Verdict expected = farkas_valid ? Verdict::ValidWithCertificate : Verdict::InvalidWithCounterexample;
    if (ir.verdict != expected) {
      ++verdict_mismatch;
      continue;
    }
    if (!farkas_valid) continue;
    ++valid;
    const Vector a = normalized(fr.alpha), b = normalized(ir.certificate->alpha);
    double err = 0.0;
    for (std::size_t i = 0; i < p; ++i) err = std::max(err, std::abs(a[i] - b[i]));
    worst = std::max(worst, err);
    if (err > 1e-6) ++alpha_mismatch;
  }
  Outcome o;
  o.pass = verdict_mismatch == 0 && alpha_mismatch == 0;
  o.detail = "100 linear instances (" + std::to_string(valid) + " with multipliers): " +
             std::to_string(verdict_mismatch) + " verdict mismatches, " + std::to_string(alpha_mismatch) +
             " multiplier mismatches > 1e-6 (max " + fmt("%.2e", worst) + ")";
  return o;
}

// ---------------------------------------------------------------------------

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  ::pclose(pipe);
  return out;
}

Outcome determinism() {
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(SPROC_CORPUS_DIR))
    if (e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  int differ = 0, matched = 0;
  for (const auto& f : files) {
    const std::string cmd = std::string("'") + SPROC_CLI + "' classify '" + f + "' 2>&1";
    const std::string a = capture(cmd), b = capture(cmd);
    if (a.empty() || a != b) ++differ;
    if (a.find("matches_expected: true") != std::string::npos) ++matched;
  }
  Outcome o;
  o.pass = !files.empty() && differ == 0;
  o.detail = std::to_string(files.size()) + " corpus files, " + std::to_string(differ) +
             " differing reports, " + std::to_string(matched) + " matching their expected verdict";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"example3 reproduction", example3_reproduction},
      {"p=1 S-lemma consistency", p1_consistency},
      {"certificate soundness", certificate_soundness},
      {"separation pipeline", separation_pipeline},
      {"LP engine", lp_engine},
      {"eigensolver", eigensolver},
      {"Farkas agreement", farkas_agreement},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
              << o.detail << " [" << fmt("%.1f", secs) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
