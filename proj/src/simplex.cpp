#include "aw/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace aw {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

LinearProgram LinearProgram::with_variables(Index n) {
  LinearProgram lp;
  lp.objective = Vector::Zero(n);
  lp.lower = Vector::Zero(n);
  lp.upper = Vector::Constant(n, kInfinity);
  lp.eq_A.resize(0, n);
  lp.eq_b.resize(0);
  lp.ub_A.resize(0, n);
  lp.ub_b.resize(0);
  return lp;
}

void LinearProgram::check_shapes() const {
  const Index n = variable_count();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("lp: bound vectors do not match variable count");
  if (eq_A.rows() != eq_b.size() || (eq_A.rows() > 0 && eq_A.cols() != n))
    throw std::invalid_argument("lp: equality block dimension mismatch");
  if (ub_A.rows() != ub_b.size() || (ub_A.rows() > 0 && ub_A.cols() != n))
    throw std::invalid_argument("lp: inequality block dimension mismatch");
  for (Index j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j]))
      throw std::invalid_argument("lp: non-finite objective coefficient");
    if (lower[j] > upper[j])
      throw std::invalid_argument("lp: empty variable bound interval");
  }
  if (eq_A.size() > 0 && !eq_A.allFinite())
    throw std::invalid_argument("lp: non-finite equality coefficient");
  if (ub_A.size() > 0 && !ub_A.allFinite())
    throw std::invalid_argument("lp: non-finite inequality coefficient");
}

LpResult solve_lp(const LinearProgram& lp) {
  lp.check_shapes();
  const Index n = lp.variable_count();

  // Map every variable onto one or two nonnegative columns.
  //   finite lower:        x = lower + y
  //   upper only:          x = upper - y
  //   free:                x = y_plus - y_minus
  // Finite two-sided intervals additionally get a bound row.
  std::vector<Index> col_of(n), neg_col_of(n, -1);
  std::vector<Scalar> shift(n, 0.0), sign(n, 1.0);
  Index ncols = 0;
  Index nbound_rows = 0;
  for (Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lp.lower[j]);
    const bool hi = std::isfinite(lp.upper[j]);
    col_of[j] = ncols++;
    if (lo) {
      shift[j] = lp.lower[j];
      if (hi) ++nbound_rows;
    } else if (hi) {
      shift[j] = lp.upper[j];
      sign[j] = -1.0;
    } else {
      neg_col_of[j] = ncols++;
    }
  }

  const Index n_eq = lp.eq_A.rows();
  const Index n_ub = lp.ub_A.rows();
  const Index slack0 = ncols;
  const Index rows = n_eq + n_ub + nbound_rows;
  const Index cols = ncols + n_ub + nbound_rows;

  detail::DenseSimplex<Scalar>::Mat A =
      detail::DenseSimplex<Scalar>::Mat::Zero(rows, cols);
  Vector b = Vector::Zero(rows);
  Vector c = Vector::Zero(cols);

  auto put = [&](Index row, Index j, Scalar coef) {
    A(row, col_of[j]) += coef * sign[j];
    if (neg_col_of[j] >= 0) A(row, neg_col_of[j]) -= coef;
  };

  for (Index j = 0; j < n; ++j) {
    c[col_of[j]] = lp.objective[j] * sign[j];
    if (neg_col_of[j] >= 0) c[neg_col_of[j]] = -lp.objective[j];
  }

  for (Index i = 0; i < n_eq; ++i) {
    Scalar rhs = lp.eq_b[i];
    for (Index j = 0; j < n; ++j) {
      const Scalar a = lp.eq_A(i, j);
      if (a == 0.0) continue;
      put(i, j, a);
      rhs -= a * shift[j];
    }
    b[i] = rhs;
  }
  for (Index i = 0; i < n_ub; ++i) {
    const Index row = n_eq + i;
    Scalar rhs = lp.ub_b[i];
    for (Index j = 0; j < n; ++j) {
      const Scalar a = lp.ub_A(i, j);
      if (a == 0.0) continue;
      put(row, j, a);
      rhs -= a * shift[j];
    }
    A(row, slack0 + i) = 1.0;
    b[row] = rhs;
  }
  Index brow = n_eq + n_ub;
  for (Index j = 0; j < n; ++j) {
    if (std::isfinite(lp.lower[j]) && std::isfinite(lp.upper[j])) {
      A(brow, col_of[j]) = 1.0;
      A(brow, slack0 + n_ub + (brow - n_eq - n_ub)) = 1.0;
      b[brow] = lp.upper[j] - lp.lower[j];
      ++brow;
    }
  }

  detail::DenseSimplex<Scalar> solver(std::move(A), std::move(b), std::move(c));
  LpResult result;
  result.status = solver.solve();
  result.iterations = solver.iterations();
  if (result.status != LpStatus::optimal) return result;

  const Vector y = solver.solution();
  result.x.resize(n);
  for (Index j = 0; j < n; ++j) {
    Scalar v = shift[j] + sign[j] * y[col_of[j]];
    if (neg_col_of[j] >= 0) v -= y[neg_col_of[j]];
    result.x[j] = v;
  }
  result.value = lp.objective.dot(result.x);
  return result;
}

}  // namespace aw
