#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "sproc/linalg.hpp"

namespace sproc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize c^T y  s.t.  A y <= b,  E y = g,  lower <= y <= upper.
struct LinearProgram {
  Vector objective;
  std::vector<Vector> inequality_rows;
  Vector inequality_rhs;
  std::vector<Vector> equality_rows;
  Vector equality_rhs;
  Vector lower;
  Vector upper;

  /// num_vars variables with bounds [0, +inf) and a zero objective.
  explicit LinearProgram(std::size_t num_vars)
      : objective(num_vars, 0.0), lower(num_vars, 0.0), upper(num_vars, kInf) {}

  std::size_t num_vars() const noexcept { return objective.size(); }

  void add_inequality(Vector row, double rhs) {
    inequality_rows.push_back(std::move(row));
    inequality_rhs.push_back(rhs);
  }
  void add_equality(Vector row, double rhs) {
    equality_rows.push_back(std::move(row));
    equality_rhs.push_back(rhs);
  }
  void set_bounds(std::size_t j, double lo, double hi) {
    lower[j] = lo;
    upper[j] = hi;
  }
  void set_free(std::size_t j) { set_bounds(j, -kInf, kInf); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus s);

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Vector solution;            // y*, when Optimal
  double objective = 0.0;     // c^T y*, when Optimal
  Vector inequality_duals;    // u >= 0 for A y <= b
  Vector equality_duals;      // v for E y = g
  Vector reduced_costs;       // c + A^T u + E^T v
  std::size_t pivots = 0;
};

/// Two-phase dense simplex with Bland's rule on an equilibrated dictionary.
/// Throws NumericalBreakdown if a pivot falls below 1e-11.
LpOutcome solve_lp(const LinearProgram& lp);

}  // namespace sproc
