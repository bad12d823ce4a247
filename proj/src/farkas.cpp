#include "sproc/farkas.hpp"

#include <algorithm>
#include <cmath>

#include "sproc/error.hpp"
#include "sproc/linprog.hpp"

namespace sproc {

std::string_view to_string(LinearSystemData::Mode mode) {
  return mode == LinearSystemData::Mode::Homogeneous ? "Homogeneous" : "Affine";
}

std::string_view to_string(FarkasResult::Kind kind) {
  switch (kind) {
    case FarkasResult::Kind::Multipliers:
      return "Multipliers";
    case FarkasResult::Kind::Alternative:
      return "Alternative";
    case FarkasResult::Kind::Inconsistent:
      return "Inconsistent";
  }
  return "?";
}

void LinearSystemData::validate() const {
  if (a0.empty()) throw InvalidArgument("linear system needs n >= 1");
  if (b.size() != rows.size()) throw DimensionMismatch("one right-hand side per constraint row is required");
  for (const auto& r : rows)
    if (r.size() != a0.size()) throw DimensionMismatch("constraint row length differs from n");
  if (mode == Mode::Homogeneous) {
    if (b0 != 0.0 || std::any_of(b.begin(), b.end(), [](double v) { return v != 0.0; }))
      throw InvalidArgument("homogeneous mode requires all right-hand sides to be zero");
  }
}

namespace {

/// alpha >= 0 with |sum alpha_i ai - a0| <= tol coordinatewise (two rows each) and, in affine
/// mode, b0 - sum alpha_i bi <= tol.
LpOutcome multiplier_lp(const LinearSystemData& d, bool affine) {
  const std::size_t p = d.num_constraints();
  LinearProgram lp(p);
  for (std::size_t k = 0; k < d.dim(); ++k) {
    Vector row(p);
    for (std::size_t i = 0; i < p; ++i) row[i] = d.rows[i][k];
    Vector neg = row;
    for (double& v : neg) v = -v;
    lp.add_inequality(std::move(row), d.a0[k] + kFarkasTol);
    lp.add_inequality(std::move(neg), -d.a0[k] + kFarkasTol);
  }
  if (affine) {
    Vector row(p);
    for (std::size_t i = 0; i < p; ++i) row[i] = -d.b[i];
    lp.add_inequality(std::move(row), -d.b0 + kFarkasTol);
  }
  return solve_lp(lp);
}

/// Free x with <ai, x> >= bi.
LinearProgram constraint_lp(const LinearSystemData& d, bool affine) {
  const std::size_t n = d.dim();
  LinearProgram lp(n);
  for (std::size_t j = 0; j < n; ++j) lp.set_free(j);
  for (std::size_t i = 0; i < d.num_constraints(); ++i) {
    Vector row = d.rows[i];
    for (double& v : row) v = -v;
    lp.add_inequality(std::move(row), affine ? -d.b[i] : 0.0);
  }
  return lp;
}

Vector clamp_nonnegative(Vector v) {
  for (double& a : v) a = std::max(0.0, a);
  return v;
}

}  // namespace

FarkasResult farkas_homogeneous(const LinearSystemData& data) {
  data.validate();
  if (data.mode != LinearSystemData::Mode::Homogeneous) throw InvalidArgument("farkas_homogeneous needs homogeneous data");
  FarkasResult res;
  const LpOutcome mult = multiplier_lp(data, false);
  if (mult.status == LpStatus::Optimal) {
    res.kind = FarkasResult::Kind::Multipliers;
    res.alpha = clamp_nonnegative(mult.solution);
    return res;
  }
  LinearProgram lp = constraint_lp(data, false);
  lp.add_inequality(data.a0, -1.0);
  const LpOutcome alt = solve_lp(lp);
  if (alt.status != LpStatus::Optimal)
    throw NumericalBreakdown("neither Farkas branch is feasible; the data are too ill-conditioned");
  res.kind = FarkasResult::Kind::Alternative;
  res.x = alt.solution;
  res.slack = -dot(data.a0, res.x);
  return res;
}

FarkasResult farkas_affine(const LinearSystemData& data) {
  data.validate();
  FarkasResult res;
  const std::size_t p = data.num_constraints();

  // Consistency of {<ai, x> >= bi}.
  const LpOutcome consistent = solve_lp(constraint_lp(data, true));
  if (consistent.status == LpStatus::Infeasible) {
    res.constraints_inconsistent = true;
    // y >= 0, sum yi ai = 0, sum yi bi >= 1.
    LinearProgram ray(p);
    for (std::size_t k = 0; k < data.dim(); ++k) {
      Vector row(p);
      for (std::size_t i = 0; i < p; ++i) row[i] = data.rows[i][k];
      ray.add_equality(std::move(row), 0.0);
    }
    Vector brow(p);
    for (std::size_t i = 0; i < p; ++i) brow[i] = -data.b[i];
    ray.add_inequality(std::move(brow), -1.0);
    const LpOutcome r = solve_lp(ray);
    if (r.status == LpStatus::Optimal) res.ray = clamp_nonnegative(r.solution);
  }

  const LpOutcome mult = multiplier_lp(data, true);
  if (mult.status == LpStatus::Optimal) {
    res.kind = FarkasResult::Kind::Multipliers;
    res.alpha = clamp_nonnegative(mult.solution);
    return res;
  }
  if (res.constraints_inconsistent) {
    res.kind = FarkasResult::Kind::Inconsistent;
    return res;
  }

  // min <a0, x> over the constraint set; when unbounded, any point with <a0, x> <= b0 - 1.
  LinearProgram lp = constraint_lp(data, true);
  lp.objective = data.a0;
  LpOutcome alt = solve_lp(lp);
  if (alt.status == LpStatus::Unbounded) {
    LinearProgram deep = constraint_lp(data, true);
    deep.add_inequality(data.a0, data.b0 - 1.0);
    alt = solve_lp(deep);
  }
  if (alt.status != LpStatus::Optimal || !(dot(data.a0, alt.solution) < data.b0 - kFarkasTol))
    throw NumericalBreakdown("neither Farkas branch is feasible; the data are too ill-conditioned");
  res.kind = FarkasResult::Kind::Alternative;
  res.x = alt.solution;
  res.slack = data.b0 - dot(data.a0, res.x);
  return res;
}

FarkasResult farkas_solve(const LinearSystemData& data) {
  return data.mode == LinearSystemData::Mode::Homogeneous ? farkas_homogeneous(data) : farkas_affine(data);
}

LinearSystemData linear_data(const FunctionSystem& system) {
  if (!system.all_affine()) throw InvalidArgument("the system is not all-affine");
  const auto qs = system.quadratics();
  LinearSystemData d;
  d.a0 = qs[0].c();
  d.b0 = -qs[0].d();
  bool homogeneous = qs[0].d() == 0.0;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    d.rows.push_back(qs[i].c());
    d.b.push_back(-qs[i].d());
    homogeneous = homogeneous && qs[i].d() == 0.0;
  }
  d.mode = homogeneous ? LinearSystemData::Mode::Homogeneous : LinearSystemData::Mode::Affine;
  return d;
}

FunctionSystem to_function_system(const LinearSystemData& data) {
  data.validate();
  std::vector<Function> constraints;
  for (std::size_t i = 0; i < data.num_constraints(); ++i)
    constraints.emplace_back(QuadraticFunction::affine(data.rows[i], data.b[i]));
  return {QuadraticFunction::affine(data.a0, data.b0), std::move(constraints)};
}

}  // namespace sproc
