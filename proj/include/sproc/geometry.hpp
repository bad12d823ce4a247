#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sproc/linalg.hpp"
#include "sproc/rng.hpp"
#include "sproc/system.hpp"

namespace sproc {

/// Finite sample of F = Im(f0, -f1, ..., -fp), drawn uniformly from [-R, R]^n.
struct ImageCloud {
  std::vector<Vector> points;   // z(x) in R^{p+1}
  std::vector<Vector> sources;  // x in R^n
  double box_radius = 0.0;
  std::uint64_t seed = 0;
  std::size_t skipped = 0;      // draws rejected because of DomainError

  std::size_t size() const noexcept { return points.size(); }
  std::size_t image_dim() const noexcept { return points.empty() ? 0 : points.front().size(); }

  void add(Vector x, Vector z) {
    sources.push_back(std::move(x));
    points.push_back(std::move(z));
  }
};

/// Throws SamplingError once more than half of the draws hit a DomainError.
ImageCloud sample_image(const FunctionSystem& system, double radius, std::size_t count, std::uint64_t seed);

/// z in K = {z0 < -tol, zi <= tol}; at tol = 0, z(x) in K iff f0(x) < 0 and fi(x) >= 0.
bool cone_k_member(std::span<const double> z, double strict_tol = 0.0);

inline constexpr double kLpTolerance = 1e-9;

struct HullTest {
  bool intersects = false;
  double optimum = 0.0;  // min of the first coordinate over the hull's part with zi <= 0
  bool feasible = false; // some convex combination has zi <= 0 for all i >= 1
  Vector weights;        // lambda over the cloud
  Vector witness;        // sum lambda_j z_j, a point of co F (sampled) in K when intersects
};

/// Finite-sample test of co F cap K:  min sum lambda_j z_j[0]  s.t.  sum lambda_j z_j[i] <= 0,
/// lambda in the simplex.
HullTest hull_intersects_k(const ImageCloud& cloud, double tol = kLpTolerance);

/// cone F cap K is empty iff co F cap K is, since cone S = R_+^*(co S) and R_+^* K = K.
inline HullTest cone_intersects_k(const ImageCloud& cloud, double tol = kLpTolerance) {
  return hull_intersects_k(cloud, tol);
}

/// alpha >= 0 with sum alpha = 1 and delta = min_j <alpha, z_j>.
struct Separator {
  Vector alpha;
  double delta = 0.0;
};

struct SeparatorSearch {
  std::optional<Separator> separator;  // present when delta >= -tol
  Separator best;                      // LP optimum even when it does not separate
  HullTest witness;                    // filled when no separator exists
};

/// max delta  s.t.  <alpha, z_j> >= delta for all j, alpha >= 0, sum alpha = 1.
SeparatorSearch extract_separator(const ImageCloud& cloud, double tol = kLpTolerance);

// ---------------------------------------------------------------------------
// Membership oracles and convexity falsification.

struct MembershipResult {
  bool member = false;
  Vector x;             // witness when member
  double margin = 0.0;  // best shortfall found (0 when member)
};

using MembershipOracle =
    std::function<MembershipResult(std::span<const double> target, std::span<const Vector> hints)>;

/// The set Z of the convexifier condition R_+(F + Z) convex.
enum class ConvexifierKind { ZeroSet, PositiveOrthant };

std::string_view to_string(ConvexifierKind kind);

struct MembershipOptions {
  int restarts = 8;          // random starts in addition to the hints
  int iterations = 80;       // Levenberg-Marquardt iterations per start
  double radius = 10.0;      // box for random starts
  std::uint64_t seed = 1;
  double accept_tol = 1e-7;  // z(x) <= m + accept_tol (epi) or |z(x) - m| <= accept_tol (identity)
};

/// Searches x with z(x) <= m componentwise (membership in F + R_+^{p+1}).
MembershipResult epi_member(const FunctionSystem& system, std::span<const double> target,
                            const MembershipOptions& options, std::span<const Vector> hints = {});

/// Searches x with z(x) = m (membership in F).
MembershipResult identity_member(const FunctionSystem& system, std::span<const double> target,
                                 const MembershipOptions& options, std::span<const Vector> hints = {});

/// Oracle for F + Z. A cloud, when given, allows exact early acceptance.
MembershipOracle make_membership_oracle(const FunctionSystem& system, ConvexifierKind kind,
                                        MembershipOptions options, const ImageCloud* cloud = nullptr);

inline constexpr int kConicalGridSize = 25;

/// Oracle for R_+(F + Z): tries m / s for 25 log-spaced s in [1e-3, 1e3]. The reported
/// margin is min_s s * margin(m / s), a shortfall measured in the scale of m.
MembershipOracle make_conical_oracle(MembershipOracle base);

inline constexpr double kViolationThreshold = 1e-3;
inline constexpr double kChordWeights[3] = {0.25, 0.5, 0.75};

struct ConvexityViolation {
  Vector z1, z2;
  double t = 0.0;
  Vector m;             // t z1 + (1 - t) z2
  int search_budget = 0;
  double margin = 0.0;
};

struct FalsificationResult {
  std::optional<ConvexityViolation> violation;
  int trials = 0;
  int queries = 0;
  double max_margin = 0.0;
};

/// Picks chords of the cloud and asks the oracle whether t z1 + (1 - t) z2 lies in the
/// tested set. A violation is reported only after both endpoints re-verify as members.
FalsificationResult falsify_convexity(const MembershipOracle& member, const ImageCloud& cloud, int trials,
                                      std::uint64_t seed, double eta = kViolationThreshold);

// ---------------------------------------------------------------------------
// Epi-image convexity scan for quadratic triples.

struct ScanOptions {
  double radius = 10.0;
  std::size_t samples = 512;
  int trials = 100;
  MembershipOptions membership;
  double eta = kViolationThreshold;
};

struct ScanEntry {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<QuadraticFunction> triple;
  FalsificationResult result;
};

struct ScanReport {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  ScanOptions options;
  std::vector<ScanEntry> entries;

  std::size_t candidates() const;
};

/// Convexity of Im(q1, q2, q3) + R_+^3 for a given triple, tested by falsification.
ScanEntry scan_triple(const std::vector<QuadraticFunction>& triple, const ScanOptions& options, std::uint64_t seed);

/// Random triples with standard normal coefficients.
ScanReport conjecture_scan(std::size_t count, std::size_t dim, std::uint64_t seed, const ScanOptions& options = {});

/// Random quadratic with N(0, 1) entries (Q symmetrized).
QuadraticFunction random_quadratic(std::size_t dim, SplitMix64& rng);

// ---------------------------------------------------------------------------
// Sample-level evidence bundle.

struct EvidenceOptions {
  double radius = 10.0;
  std::size_t samples = 1024;
  std::uint64_t seed = 1;
  double lp_tol = kLpTolerance;
  int trials = 200;          // identity and epi falsifiers
  int conical_trials = 25;   // each conical query scans 25 scales
  double eta = kViolationThreshold;
  MembershipOptions membership;
  bool identity = true;
  bool epi = true;
  bool conical = true;
};

struct GeometryEvidence {
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::size_t cloud_size = 0;
  std::size_t skipped = 0;
  std::size_t k_points = 0;             // sampled points of F in K
  std::optional<Vector> k_witness;      // source x of the first such point
  HullTest hull;
  SeparatorSearch separator;
  std::optional<FalsificationResult> identity;  // convexity of F
  std::optional<FalsificationResult> epi;       // convexity of F + R_+^{p+1}
  std::optional<FalsificationResult> conical;   // convexity of R_+ F
};

/// Samples F and runs the K, hull, separator and convexity tests on the cloud.
GeometryEvidence collect_geometry_evidence(const FunctionSystem& system, const EvidenceOptions& options,
                                           ImageCloud* cloud_out = nullptr);

/// "# p=<p> n=<n> R=<R> seed=<seed> N=<N>" then one line per point: z columns, then x columns.
void export_cloud(const ImageCloud& cloud, std::ostream& out);

}  // namespace sproc
