#include <cmath>

#include "doctest.h"
#include "sproc/error.hpp"
#include "sproc/farkas.hpp"
#include "sproc/rng.hpp"

using namespace sproc;

namespace {

LinearSystemData homogeneous(Vector a0, std::vector<Vector> rows) {
  LinearSystemData d;
  d.a0 = std::move(a0);
  d.rows = std::move(rows);
  d.b.assign(d.rows.size(), 0.0);
  d.mode = LinearSystemData::Mode::Homogeneous;
  return d;
}

LinearSystemData affine(Vector a0, double b0, std::vector<Vector> rows, Vector b) {
  LinearSystemData d;
  d.a0 = std::move(a0);
  d.b0 = b0;
  d.rows = std::move(rows);
  d.b = std::move(b);
  d.mode = LinearSystemData::Mode::Affine;
  return d;
}

void check_branch(const LinearSystemData& d, const FarkasResult& r) {
  if (r.kind == FarkasResult::Kind::Multipliers) {
    for (double a : r.alpha) CHECK(a >= 0.0);
    for (std::size_t k = 0; k < d.dim(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < d.num_constraints(); ++i) s += r.alpha[i] * d.rows[i][k];
      CHECK(std::abs(s - d.a0[k]) <= 1e-8);
    }
    if (d.mode == LinearSystemData::Mode::Affine) {
      double s = 0.0;
      for (std::size_t i = 0; i < d.num_constraints(); ++i) s += r.alpha[i] * d.b[i];
      CHECK(d.b0 - s <= 1e-8);
    }
  } else if (r.kind == FarkasResult::Kind::Alternative) {
    for (std::size_t i = 0; i < d.num_constraints(); ++i) CHECK(dot(d.rows[i], r.x) >= d.b[i] - 1e-9);
    CHECK(dot(d.a0, r.x) < d.b0 - 1e-9);
    if (d.mode == LinearSystemData::Mode::Homogeneous) CHECK(r.slack >= 1.0 - 1e-9);
  }
}

}  // namespace

TEST_CASE("homogeneous Farkas examples") {
  const auto d1 = homogeneous({2.0, 3.0}, {{1.0, 0.0}, {0.0, 1.0}});
  const FarkasResult r1 = farkas_homogeneous(d1);
  REQUIRE(r1.kind == FarkasResult::Kind::Multipliers);
  CHECK(std::abs(r1.alpha[0] - 2.0) <= 1e-8);
  CHECK(std::abs(r1.alpha[1] - 3.0) <= 1e-8);

  const FarkasResult r2 = farkas_homogeneous(homogeneous({0.0, 0.0}, {{1.0, 2.0}}));
  REQUIRE(r2.kind == FarkasResult::Kind::Multipliers);
  CHECK(r2.alpha[0] == doctest::Approx(0.0));

  const auto d3 = homogeneous({-1.0, 0.0}, {{1.0, 0.0}});
  const FarkasResult r3 = farkas_homogeneous(d3);
  REQUIRE(r3.kind == FarkasResult::Kind::Alternative);
  check_branch(d3, r3);

  const auto none = homogeneous({1.0, -1.0}, {});
  const FarkasResult r4 = farkas_homogeneous(none);
  CHECK(r4.kind == FarkasResult::Kind::Alternative);
  check_branch(none, r4);
}

TEST_CASE("affine Farkas examples") {
  const FarkasResult r1 = farkas_affine(affine({1.0, -2.0}, 0.5, {{1.0, -2.0}}, {0.5}));
  REQUIRE(r1.kind == FarkasResult::Kind::Multipliers);
  CHECK(r1.alpha[0] == doctest::Approx(1.0));

  const auto d2 = affine({1.0}, 1.0, {{1.0}}, {0.0});
  const FarkasResult r2 = farkas_affine(d2);
  REQUIRE(r2.kind == FarkasResult::Kind::Alternative);
  check_branch(d2, r2);
  CHECK(r2.x[0] >= 0.0);
  CHECK(r2.x[0] < 1.0);

  const FarkasResult r3 = farkas_affine(affine({1.0, 1.0}, 0.0, {{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}));
  REQUIRE(r3.kind == FarkasResult::Kind::Multipliers);
  CHECK(r3.alpha[0] == doctest::Approx(1.0));
  CHECK(r3.alpha[1] == doctest::Approx(1.0));
}

TEST_CASE("inconsistent constraints are flagged") {
  // x >= 1 and -x >= 0.
  const auto vac = affine({1.0}, 0.0, {{1.0}, {-1.0}}, {1.0, 0.0});
  const FarkasResult r = farkas_affine(vac);
  CHECK(r.constraints_inconsistent);
  CHECK(r.kind == FarkasResult::Kind::Multipliers);
  REQUIRE(r.ray.size() == 2);
  CHECK(r.ray[0] * 1.0 + r.ray[1] * -1.0 == doctest::Approx(0.0));
  CHECK(r.ray[0] * 1.0 >= 1.0 - 1e-9);

  // a0 outside the cone of the rows: no multipliers at all.
  const auto out = affine({0.0, 1.0}, 0.0, {{1.0, 0.0}, {-1.0, 0.0}}, {1.0, 0.0});
  const FarkasResult r2 = farkas_affine(out);
  CHECK(r2.kind == FarkasResult::Kind::Inconsistent);
  CHECK(r2.constraints_inconsistent);
}

TEST_CASE("data validation") {
  CHECK_THROWS_AS(farkas_homogeneous(homogeneous({1.0}, {{1.0, 2.0}})), DimensionMismatch);
  auto d = homogeneous({1.0}, {{1.0}});
  d.b = {1.0};
  CHECK_THROWS_AS(farkas_homogeneous(d), InvalidArgument);
  CHECK_THROWS_AS(farkas_homogeneous(affine({1.0}, 1.0, {{1.0}}, {0.0})), InvalidArgument);
}

TEST_CASE("exactly one branch re-verifies on random instances") {
  SplitMix64 rng(5);
  int mult = 0, alt = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(5);
    const std::size_t p = 1 + rng.below(4);
    const bool hom = trial % 2 == 0;
    std::vector<Vector> rows(p, Vector(n));
    for (auto& r : rows)
      for (double& v : r) v = rng.uniform(-1.0, 1.0);
    Vector a0(n);
    Vector b(p, 0.0);
    double b0 = 0.0;
    if (!hom)
      for (double& v : b) v = rng.uniform(-1.0, 1.0);
    if (rng.uniform() < 0.5) {
      // Constructed inside the cone.
      for (std::size_t i = 0; i < p; ++i) {
        const double a = rng.uniform(0.0, 2.0);
        for (std::size_t k = 0; k < n; ++k) a0[k] += a * rows[i][k];
        b0 += a * b[i];
      }
      if (!hom) b0 -= rng.uniform(0.0, 1.0);
    } else {
      for (double& v : a0) v = rng.uniform(-1.0, 1.0);
      if (!hom) b0 = rng.uniform(-1.0, 1.0);
    }
    const LinearSystemData d = hom ? homogeneous(a0, rows) : affine(a0, b0, rows, b);
    const FarkasResult r = farkas_solve(d);
    check_branch(d, r);
    if (r.kind == FarkasResult::Kind::Multipliers) ++mult;
    if (r.kind == FarkasResult::Kind::Alternative) ++alt;
  }
  CHECK(mult >= 50);
  CHECK(alt >= 30);
}

TEST_CASE("round trip through affine functions") {
  const auto d = affine({1.0, 2.0}, 0.5, {{1.0, 0.0}}, {-1.0});
  const FunctionSystem s = to_function_system(d);
  CHECK(s.all_affine());
  const LinearSystemData back = linear_data(s);
  CHECK(back.a0 == d.a0);
  CHECK(back.b0 == d.b0);
  CHECK(back.rows == d.rows);
  CHECK(back.b == d.b);
  CHECK(back.mode == LinearSystemData::Mode::Affine);
  CHECK(s.objective()(std::vector<double>{1.0, 1.0}) == 2.5);
}
