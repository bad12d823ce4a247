#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sproc/certificate.hpp"
#include "sproc/geometry.hpp"
#include "sproc/linalg.hpp"
#include "sproc/system.hpp"

namespace sproc {

/// Feasibility threshold of a counterexample (fi >= -1e-9) and its strictness (f0 < -1e-9).
inline constexpr double kCounterexampleTol = 1e-9;
/// A Slater point needs min_i fi(x0) > 1e-9.
inline constexpr double kSlaterTol = 1e-9;

struct SlaterResult {
  bool found = false;
  Vector x0;
  double min_constraint_value = 0.0;  // min_i fi(x0); +inf when p = 0
};

/// Searches x0 with fi(x0) > 0 for all constraints. p = 0 holds vacuously at x0 = 0.
SlaterResult check_slater(const FunctionSystem& system, double radius, std::size_t samples, std::uint64_t seed);

struct CounterexampleOptions {
  double radius = 10.0;
  std::size_t samples = 4096;
  std::uint64_t seed = 1;
  int refine_iters = 200;
  double penalty = 1e3;
  int starts = 20;
};

struct CounterexampleResult {
  bool found = false;
  Vector x;                           // counterexample
  Vector values;                      // (f0, ..., fp) at x
  std::optional<Vector> closest_miss; // feasible point with the smallest f0 seen
  double closest_f0 = 0.0;
  std::size_t skipped = 0;
};

/// Box sampling, then penalized descent on f0 + w sum max(0, -fi)^2 from the best starts,
/// then feasibility restoration.
CounterexampleResult find_counterexample(const FunctionSystem& system, const CounterexampleOptions& options = {});

/// True iff fi(x) >= -1e-9 for i >= 1 and f0(x) < -1e-9.
bool is_counterexample(std::span<const double> values);

enum class Verdict { ValidWithCertificate, InvalidWithCounterexample, Undetermined };

std::string_view to_string(Verdict v);

struct ClassifyConfig {
  double radius = 10.0;
  std::size_t samples = 4096;
  std::uint64_t seed = 1;
  double tol = kPsdRelativeTolerance;
  double lp_tol = kLpTolerance;
  int refine_iters = 200;
  double penalty = 1e3;
  double alpha_max = kDefaultAlphaMax;
  int supergradient_iters = kSupergradientIterations;
  int separation_rounds = 3;
  std::size_t geometry_samples = 1024;
  int falsify_trials = 200;
  int conical_trials = 25;
};

struct StageDiagnostic {
  std::string stage;
  std::string message;
  bool numerical = false;
};

struct InstanceReport {
  Verdict verdict = Verdict::Undetermined;
  SlaterResult slater;
  CounterexampleResult counterexample;
  bool certificate_searched = false;
  std::string certificate_method;     // psd, p1, supergradient, affine-lp
  std::optional<CertificateSearch> quadratic_search;
  std::optional<SeparationSearch> separation;
  std::optional<Certificate> certificate;
  std::optional<GeometryEvidence> geometry;
  ClassifyConfig config;
  std::vector<StageDiagnostic> diagnostics;

  bool numerical_failure() const;
};

/// Slater check, counterexample search, certificate search (quadratic path, then separation),
/// and geometry evidence when nothing is settled.
InstanceReport classify_instance(const FunctionSystem& system, const ClassifyConfig& config = {});

/// Stage seeds: derive_seed(config.seed, tag).
enum class Stage : std::uint64_t { Slater = 1, Counterexample = 2, Separation = 3, Verification = 4, Geometry = 5 };

std::uint64_t stage_seed(std::uint64_t seed, Stage stage);

}  // namespace sproc
