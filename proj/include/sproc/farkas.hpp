#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "sproc/linalg.hpp"
#include "sproc/system.hpp"

namespace sproc {

/// f0(x) = <a0, x> - b0 and fi(x) = <ai, x> - bi.
struct LinearSystemData {
  enum class Mode { Homogeneous, Affine };

  Vector a0;
  double b0 = 0.0;
  std::vector<Vector> rows;
  Vector b;
  Mode mode = Mode::Homogeneous;

  std::size_t dim() const noexcept { return a0.size(); }
  std::size_t num_constraints() const noexcept { return rows.size(); }
  /// Throws DimensionMismatch / InvalidArgument when inconsistent.
  void validate() const;
};

std::string_view to_string(LinearSystemData::Mode mode);

struct FarkasResult {
  enum class Kind { Multipliers, Alternative, Inconsistent };

  Kind kind = Kind::Multipliers;
  Vector alpha;                 // Multipliers: a0 = sum alpha_i ai, alpha >= 0 (and b0 <= sum alpha_i bi)
  Vector x;                     // Alternative: <ai, x> >= bi and <a0, x> < b0
  double slack = 0.0;           // Alternative: b0 - <a0, x>
  bool constraints_inconsistent = false;  // {<ai, x> >= bi} is empty
  Vector ray;                   // y >= 0 with sum yi ai = 0 and sum yi bi > 0, when inconsistent
};

std::string_view to_string(FarkasResult::Kind kind);

inline constexpr double kFarkasTol = 1e-9;

/// a0 = sum alpha_i ai, alpha >= 0; otherwise x with <ai, x> >= 0 and <a0, x> <= -1.
FarkasResult farkas_homogeneous(const LinearSystemData& data);

/// a0 = sum alpha_i ai, alpha >= 0, b0 - sum alpha_i bi <= 0; otherwise x with <ai, x> >= bi
/// and <a0, x> < b0. An inconsistent constraint system is flagged, never silently accepted.
FarkasResult farkas_affine(const LinearSystemData& data);

/// Dispatches on data.mode.
FarkasResult farkas_solve(const LinearSystemData& data);

/// Extracts the data of an all-affine system; throws InvalidArgument otherwise.
LinearSystemData linear_data(const FunctionSystem& system);

/// The same data as affine quadratics (Q = 0).
FunctionSystem to_function_system(const LinearSystemData& data);

}  // namespace sproc
