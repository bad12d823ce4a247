#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sproc/farkas.hpp"
#include "sproc/linalg.hpp"
#include "sproc/system.hpp"

namespace sproc {

/// One of f0, ..., fp as written in a problem file.
struct ProblemEntry {
  enum class Kind { Quadratic, Expr, Linear };

  Kind kind = Kind::Quadratic;
  Matrix Q;              // quadratic: 1/2 x^T Q x + c^T x + d
  Vector c;
  double d = 0.0;
  std::string expr;      // expr
  Vector a;              // linear: <a, x> - b
  double b = 0.0;

  Function function(std::size_t n) const;
};

struct ProblemConfig {
  std::optional<double> R;
  std::optional<std::size_t> N;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

/// Problem file (JSON):
///
///   {
///     "name": "example3_pair",               optional
///     "description": "...",                  optional
///     "n": 2, "p": 1,
///     "functions": [                         p + 1 entries, f0 first
///       {"quadratic": {"Q": [4, 0, 0, -2], "c": [0, 0], "d": 0}},   Q row-major (flat or nested)
///       {"linear": {"a": [1, 1], "b": 0}},                           <a, x> - b
///       {"expr": "x1^2 - 1"}
///     ],
///     "config": {"R": 10, "N": 4096, "seed": 1, "tol": 1e-9},       optional
///     "expected_verdict": "InvalidWithCounterexample"              optional
///   }
///
/// Unknown keys are rejected.
struct ProblemFile {
  std::string name;
  std::string description;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<ProblemEntry> functions;
  ProblemConfig config;
  std::optional<std::string> expected_verdict;

  FunctionSystem system() const;
  /// True when every entry is linear or a quadratic with Q = 0.
  bool all_linear() const;
  LinearSystemData linear_data() const;
};

/// Throws ParseError (with line or field) or DimensionMismatch.
ProblemFile parse_problem(std::string_view text, std::string_view source = "<input>");

ProblemFile load_problem(const std::string& path);

}  // namespace sproc
