#include "sproc/linprog.hpp"

#include <algorithm>
#include <cmath>

#include "sproc/error.hpp"

namespace sproc {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "Optimal";
    case LpStatus::Infeasible:
      return "Infeasible";
    case LpStatus::Unbounded:
      return "Unbounded";
  }
  return "?";
}

namespace {

constexpr double kEps = 1e-9;
constexpr double kMinPivot = 1e-11;

// maximize c^T s  s.t.  A s <= b, s >= 0, held as a dictionary:
//   basic[i] = rhs[i] - sum_j T(i, j) nonbasic[j]
//   z        = z0     + sum_j r[j]    nonbasic[j]
// Variables 0..n-1 are structural, n..n+m-1 slacks, n+m the phase-1 artificial.
class Dictionary {
 public:
  Dictionary(const std::vector<Vector>& a, const Vector& b, std::size_t n)
      : m_(a.size()), n_(n), rows_(a.size()), rhs_(b), basis_(a.size()) {
    for (std::size_t i = 0; i < m_; ++i) {
      rows_[i] = a[i];
      basis_[i] = n + i;
    }
    nonbasic_.resize(n);
    for (std::size_t j = 0; j < n; ++j) nonbasic_[j] = j;
    r_.assign(n, 0.0);
  }

  enum class Result { Optimal, Infeasible, Unbounded };

  Result solve(const Vector& c) {
    const std::size_t artificial = n_ + m_;
    std::size_t worst = m_;
    for (std::size_t i = 0; i < m_; ++i)
      if (rhs_[i] < -kEps && (worst == m_ || rhs_[i] < rhs_[worst])) worst = i;

    if (worst != m_) {
      for (auto& row : rows_) row.push_back(-1.0);
      nonbasic_.push_back(artificial);
      r_.assign(nonbasic_.size(), 0.0);
      r_.back() = -1.0;
      z0_ = 0.0;
      pivot(worst, nonbasic_.size() - 1);
      if (run() != Result::Optimal) throw NumericalBreakdown("phase 1 reported an unbounded auxiliary problem");
      if (z0_ < -kEps) return Result::Infeasible;
      remove_artificial(artificial);
    }
    for (double& v : rhs_)
      if (v < 0.0 && v > -kEps) v = 0.0;

    r_.assign(nonbasic_.size(), 0.0);
    z0_ = 0.0;
    for (std::size_t j = 0; j < nonbasic_.size(); ++j)
      if (nonbasic_[j] < n_) r_[j] = c[nonbasic_[j]];
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) continue;
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      z0_ += cb * rhs_[i];
      for (std::size_t j = 0; j < nonbasic_.size(); ++j) r_[j] -= cb * rows_[i][j];
    }
    return run();
  }

  Vector structural_values() const {
    Vector s(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) s[basis_[i]] = std::max(0.0, rhs_[i]);
    return s;
  }

  /// Dual prices of the original rows (zero for basic slacks).
  Vector row_duals(std::size_t original_rows) const {
    Vector y(original_rows, 0.0);
    for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
      const std::size_t v = nonbasic_[j];
      if (v >= n_ && v < n_ + original_rows) y[v - n_] = std::max(0.0, -r_[j]);
    }
    return y;
  }

  double value() const noexcept { return z0_; }
  std::size_t pivots() const noexcept { return pivots_; }

 private:
  Result run() {
    const std::size_t limit = 50000 + 20 * (m_ + nonbasic_.size());
    for (;;) {
      if (pivots_ > limit) throw NumericalBreakdown("simplex iteration limit reached");
      std::size_t enter = nonbasic_.size();
      for (std::size_t j = 0; j < nonbasic_.size(); ++j)
        if (r_[j] > kEps && (enter == nonbasic_.size() || nonbasic_[j] < nonbasic_[enter])) enter = j;
      if (enter == nonbasic_.size()) return Result::Optimal;

      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double t = rows_[i][enter];
        if (t <= kEps) continue;
        const double ratio = std::max(0.0, rhs_[i]) / t;
        const double slack = 1e-12 * (1.0 + best);
        if (leave == m_ || ratio < best - slack) {
          leave = i;
          best = ratio;
        } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
          leave = i;
          best = std::min(best, ratio);
        }
      }
      if (leave == m_) return Result::Unbounded;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t i, std::size_t j) {
    const double p = rows_[i][j];
    if (std::abs(p) < kMinPivot) throw NumericalBreakdown("pivot below 1e-11; rescale the input");
    ++pivots_;
    Vector& pr = rows_[i];
    const std::size_t k = pr.size();
    for (std::size_t c = 0; c < k; ++c)
      if (c != j) pr[c] /= p;
    pr[j] = 1.0 / p;
    rhs_[i] /= p;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == i) continue;
      Vector& row = rows_[r];
      const double f = row[j];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < k; ++c)
        if (c != j) row[c] -= f * pr[c];
      row[j] = -f * pr[j];
      rhs_[r] -= f * rhs_[i];
    }
    const double f = r_[j];
    if (f != 0.0) {
      for (std::size_t c = 0; c < k; ++c)
        if (c != j) r_[c] -= f * pr[c];
      r_[j] = -f * pr[j];
      z0_ += f * rhs_[i];
    }
    std::swap(basis_[i], nonbasic_[j]);
  }

  void remove_artificial(std::size_t artificial) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] != artificial) continue;
      std::size_t best = nonbasic_.size();
      for (std::size_t j = 0; j < nonbasic_.size(); ++j)
        if (best == nonbasic_.size() || std::abs(rows_[i][j]) > std::abs(rows_[i][best])) best = j;
      if (best != nonbasic_.size() && std::abs(rows_[i][best]) > kEps) {
        pivot(i, best);
      } else {
        // Redundant row: the artificial stays at zero whatever the nonbasics do.
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        --m_;
      }
      break;
    }
    for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
      if (nonbasic_[j] != artificial) continue;
      for (auto& row : rows_) row.erase(row.begin() + static_cast<std::ptrdiff_t>(j));
      nonbasic_.erase(nonbasic_.begin() + static_cast<std::ptrdiff_t>(j));
      r_.erase(r_.begin() + static_cast<std::ptrdiff_t>(j));
      break;
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<Vector> rows_;
  Vector rhs_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nonbasic_;
  Vector r_;
  double z0_ = 0.0;
  std::size_t pivots_ = 0;
};

// y_j = offset_j + sum over terms of coeff * s_k, with s >= 0.
struct VariableMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;
};

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
  const std::size_t m = lp.num_vars();
  if (lp.lower.size() != m || lp.upper.size() != m) throw DimensionMismatch("LP bounds size");
  if (lp.inequality_rows.size() != lp.inequality_rhs.size() || lp.equality_rows.size() != lp.equality_rhs.size())
    throw DimensionMismatch("LP right-hand side size");
  for (const auto& row : lp.inequality_rows)
    if (row.size() != m) throw DimensionMismatch("LP inequality row size");
  for (const auto& row : lp.equality_rows)
    if (row.size() != m) throw DimensionMismatch("LP equality row size");

  LpOutcome out;
  std::vector<VariableMap> map(m);
  std::size_t ns = 0;
  std::vector<Vector> rows;
  Vector rhs;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (s index, bound)
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (lo > hi) return out;  // empty box
    if (std::isfinite(lo)) {
      map[j] = {lo, {{ns, 1.0}}};
      if (std::isfinite(hi)) upper_rows.emplace_back(ns, hi - lo);
      ++ns;
    } else if (std::isfinite(hi)) {
      map[j] = {hi, {{ns, -1.0}}};
      ++ns;
    } else {
      map[j] = {0.0, {{ns, 1.0}, {ns + 1, -1.0}}};
      ns += 2;
    }
  }

  auto transform = [&](const Vector& row, double b) {
    Vector t(ns, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (row[j] == 0.0) continue;
      b -= row[j] * map[j].offset;
      for (auto [k, coef] : map[j].terms) t[k] += row[j] * coef;
    }
    return std::pair{t, b};
  };

  const std::size_t k_ineq = lp.inequality_rows.size();
  const std::size_t k_eq = lp.equality_rows.size();
  for (std::size_t i = 0; i < k_ineq; ++i) {
    auto [t, b] = transform(lp.inequality_rows[i], lp.inequality_rhs[i]);
    rows.push_back(std::move(t));
    rhs.push_back(b);
  }
  for (std::size_t i = 0; i < k_eq; ++i) {
    auto [t, b] = transform(lp.equality_rows[i], lp.equality_rhs[i]);
    Vector neg = t;
    for (double& v : neg) v = -v;
    rows.push_back(std::move(t));
    rhs.push_back(b);
    rows.push_back(std::move(neg));
    rhs.push_back(-b);
  }
  for (auto [k, bound] : upper_rows) {
    Vector t(ns, 0.0);
    t[k] = 1.0;
    rows.push_back(std::move(t));
    rhs.push_back(bound);
  }

  // Row equilibration to unit max-norm.
  Vector scale(rows.size(), 1.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double mx = norm_inf(rows[i]);
    if (mx > 0.0) {
      scale[i] = 1.0 / mx;
      for (double& v : rows[i]) v *= scale[i];
      rhs[i] *= scale[i];
    }
  }

  Vector c(ns, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (auto [k, coef] : map[j].terms) c[k] -= lp.objective[j] * coef;
  }

  Dictionary dict(rows, rhs, ns);
  const auto result = dict.solve(c);
  out.pivots = dict.pivots();
  if (result == Dictionary::Result::Infeasible) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  if (result == Dictionary::Result::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  out.status = LpStatus::Optimal;
  const Vector s = dict.structural_values();
  out.solution.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double y = map[j].offset;
    for (auto [k, coef] : map[j].terms) y += coef * s[k];
    out.solution[j] = y;
  }
  out.objective = dot(lp.objective, out.solution);

  Vector duals = dict.row_duals(rows.size());
  for (std::size_t i = 0; i < duals.size(); ++i) duals[i] *= scale[i];
  out.inequality_duals.assign(duals.begin(), duals.begin() + static_cast<std::ptrdiff_t>(k_ineq));
  out.equality_duals.assign(k_eq, 0.0);
  for (std::size_t i = 0; i < k_eq; ++i) out.equality_duals[i] = duals[k_ineq + 2 * i] - duals[k_ineq + 2 * i + 1];

  out.reduced_costs = lp.objective;
  for (std::size_t i = 0; i < k_ineq; ++i)
    for (std::size_t j = 0; j < m; ++j) out.reduced_costs[j] += lp.inequality_rows[i][j] * out.inequality_duals[i];
  for (std::size_t i = 0; i < k_eq; ++i)
    for (std::size_t j = 0; j < m; ++j) out.reduced_costs[j] += lp.equality_rows[i][j] * out.equality_duals[i];
  return out;
}

}  // namespace sproc
