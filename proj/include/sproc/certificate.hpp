#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sproc/geometry.hpp"
#include "sproc/linalg.hpp"
#include "sproc/quadratic.hpp"
#include "sproc/system.hpp"

namespace sproc {

enum class Verification { ExactPSD, SampledOnly, Failed };

std::string_view to_string(Verification v);

/// Multipliers alpha >= 0 for f0 - sum alpha_i fi >= 0.
struct Certificate {
  Vector alpha;
  double lambda_min = 0.0;  // of M(alpha) = M0 - sum alpha_i Mi on the quadratic path
  Verification verified = Verification::Failed;
};

/// M0 - sum alpha_i Mi over the bordered matrices of a quadratic system.
Matrix combined_bordered_matrix(std::span<const Matrix> bordered, std::span<const double> alpha);

std::vector<Matrix> bordered_matrices(const FunctionSystem& system);

struct QuadraticVerification {
  bool valid = false;
  double lambda_min = 0.0;
  double threshold = 0.0;               // -tol (1 + ||M(alpha)||_max)
  Vector direction;                     // min eigenvector of M(alpha)
  std::optional<Vector> violating_x;    // dehomogenized direction, when its last entry is >= 1e-8
};

/// Exact test of f0 - sum alpha_i fi >= 0 on R^n via PSD of the bordered matrix.
QuadraticVerification verify_certificate_quadratic(const FunctionSystem& system, std::span<const double> alpha,
                                                   double tol = kPsdRelativeTolerance);

inline constexpr double kSampledViolation = 1e-6;

struct SampledVerification {
  bool violated = false;
  Vector x;                  // minimizer found
  double value = 0.0;        // refined minimum of f0 - sum alpha_i fi
  double min_observed = 0.0; // smallest raw sample value
  std::size_t skipped = 0;
};

/// N box samples plus BFGS refinement from the 10 smallest; violated iff the refined value < -1e-6.
SampledVerification verify_certificate_sampled(const FunctionSystem& system, std::span<const double> alpha,
                                               double radius, std::size_t samples, std::uint64_t seed);

struct CertificateSearch {
  bool found = false;
  Certificate certificate;   // best multipliers seen
  bool boundary = false;     // best alpha sits at alpha_max (p = 1)
  int iterations = 0;
};

inline constexpr double kDefaultAlphaMax = 1e4;

/// p = 1: golden-section search on the concave g(alpha) = lambda_min(M(alpha)) over [0, alpha_max].
CertificateSearch find_certificate_p1(const FunctionSystem& system, double alpha_max = kDefaultAlphaMax,
                                      double tol = kPsdRelativeTolerance);

inline constexpr int kSupergradientIterations = 2000;

/// Projected supergradient ascent on g over R_+^p with steps a0 / sqrt(k).
CertificateSearch find_certificate_general(const FunctionSystem& system, int iterations = kSupergradientIterations,
                                           std::uint64_t seed = 1, double tol = kPsdRelativeTolerance);

/// All-affine systems: M(alpha) is PSD iff c(alpha) = 0 and d(alpha) >= 0, an LP.
/// Maximizes d(alpha) subject to c0 = sum alpha_i ci, then verifies PSD.
CertificateSearch find_certificate_affine(const FunctionSystem& system, double tol = kPsdRelativeTolerance);

enum class SeparationStatus { Found, NoSeparator, SlaterBlocked, RefinementExhausted };

std::string_view to_string(SeparationStatus s);

struct SeparationOptions {
  double lp_tol = kLpTolerance;
  double psd_tol = kPsdRelativeTolerance;
  double alpha0_floor = 1e-8;
  int rounds = 3;                // re-verify and enlarge the cloud at most this many times
  double radius = 10.0;          // sampled verification of non-quadratic systems
  std::size_t verify_samples = 4096;
  std::uint64_t seed = 1;
};

struct SeparationSearch {
  SeparationStatus status = SeparationStatus::NoSeparator;
  Certificate certificate;
  Separator separator;     // last LP separator
  HullTest witness;        // when NoSeparator
  int rounds = 0;
  std::size_t cloud_size = 0;
};

/// Separator of the cloud from K, divided by its first entry. Failed verifications feed
/// violating points back into the cloud.
SeparationSearch find_certificate_via_separation(const FunctionSystem& system, const ImageCloud& cloud,
                                                 const SeparationOptions& options = {});

/// "alpha = [..]", "lambda_min = ..", "verified = ..".
std::string serialize_certificate(const Certificate& certificate);

}  // namespace sproc
