#include <doctest.h>

#include <random>

#include "aw/simplex.hpp"

using namespace aw;

TEST_CASE("min x subject to x >= 3") {
  LinearProgram lp = LinearProgram::with_variables(1);
  lp.objective << 1.0;
  lp.lower << 3.0;
  const LpResult r = solve_lp(lp);
  CHECK(r.status == LpStatus::optimal);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("transportation polytope with zero cost") {
  // 2x2 coupling variables, marginals (0.5, 0.5) both sides.
  LinearProgram lp = LinearProgram::with_variables(4);
  lp.eq_A.resize(4, 4);
  lp.eq_A << 1, 1, 0, 0,
             0, 0, 1, 1,
             1, 0, 1, 0,
             0, 1, 0, 1;
  lp.eq_b.resize(4);
  lp.eq_b << 0.5, 0.5, 0.5, 0.5;
  const LpResult r = solve_lp(lp);
  CHECK(r.status == LpStatus::optimal);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.x.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded are reported") {
  LinearProgram lp = LinearProgram::with_variables(1);
  lp.objective << 1.0;
  lp.eq_A.resize(1, 1);
  lp.eq_A << 1.0;
  lp.eq_b.resize(1);
  lp.eq_b << -2.0;  // x = -2 conflicts with x >= 0
  CHECK(solve_lp(lp).status == LpStatus::infeasible);

  LinearProgram lp2 = LinearProgram::with_variables(1);
  lp2.objective << -1.0;
  CHECK(solve_lp(lp2).status == LpStatus::unbounded);
}

TEST_CASE("free variables and box bounds") {
  // min m + s, s >= 4 - m - h, s >= 0, h in [-1, 1], m free.
  // Optimal: h = 1, m large... objective m + s with s >= 4 - m - h:
  // at s = 0 need m >= 3; objective m >= 3.  Optimum 3.
  LinearProgram lp = LinearProgram::with_variables(3);  // m, h, s
  lp.objective << 1.0, 0.0, 1.0;
  lp.lower << -kInfinity, -1.0, 0.0;
  lp.upper << kInfinity, 1.0, kInfinity;
  lp.ub_A.resize(1, 3);
  lp.ub_A << -1.0, -1.0, -1.0;  // -m - h - s <= -4
  lp.ub_b.resize(1);
  lp.ub_b << -4.0;
  const LpResult r = solve_lp(lp);
  CHECK(r.status == LpStatus::optimal);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(1.0));
}

namespace {

// Brute-force optimum by enumerating basic solutions of Ax = b, x >= 0.
double enumerate_optimum(const Matrix& A, const Vector& b, const Vector& c) {
  const Index m = A.rows();
  const Index n = A.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> idx(m);
  std::function<void(Index, Index)> rec = [&](Index start, Index chosen) {
    if (chosen == m) {
      Matrix B(m, m);
      for (Index k = 0; k < m; ++k) B.col(k) = A.col(idx[k]);
      Eigen::FullPivLU<Matrix> lu(B);
      if (!lu.isInvertible()) return;
      const Vector xb = lu.solve(b);
      if ((xb.array() < -1e-9).any()) return;
      double val = 0;
      for (Index k = 0; k < m; ++k) val += c[idx[k]] * xb[k];
      best = std::min(best, val);
      return;
    }
    for (Index j = start; j <= n - (m - chosen); ++j) {
      idx[chosen] = j;
      rec(j + 1, chosen + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("random 5x5 transport LP matches basic-solution enumeration") {
  std::mt19937_64 gen(20240517);
  auto uni = [&] { return std::ldexp(static_cast<double>(gen() >> 11), -53); };

  for (int rep = 0; rep < 3; ++rep) {
    const Index n = 5;
    Vector mu(n), nu(n);
    double smu = 0, snu = 0;
    for (Index i = 0; i < n; ++i) {
      mu[i] = 0.1 + uni();
      nu[i] = 0.1 + uni();
      smu += mu[i];
      snu += nu[i];
    }
    mu /= smu;
    nu /= snu;

    Matrix cost(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) cost(i, j) = uni();

    LinearProgram lp = LinearProgram::with_variables(n * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) lp.objective[i * n + j] = cost(i, j);
    // Row sums and column sums; one redundant row is kept on purpose.
    lp.eq_A = Matrix::Zero(2 * n, n * n);
    lp.eq_b.resize(2 * n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        lp.eq_A(i, i * n + j) = 1.0;
        lp.eq_A(n + j, i * n + j) = 1.0;
      }
      lp.eq_b[i] = mu[i];
      lp.eq_b[n + i] = nu[i];
    }
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::optimal);

    // Standard form for the oracle: drop the redundant last row.
    Matrix A = lp.eq_A.topRows(2 * n - 1);
    Vector b = lp.eq_b.head(2 * n - 1);
    const double oracle = enumerate_optimum(A, b, lp.objective);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("determinism: identical input gives identical pivots") {
  LinearProgram lp = LinearProgram::with_variables(6);
  lp.objective << 3, 1, 4, 1, 5, 9;
  lp.ub_A.resize(2, 6);
  lp.ub_A << -1, -1, 0, 0, -1, 0,
             0, -1, -1, -1, 0, -1;
  lp.ub_b.resize(2);
  lp.ub_b << -2, -3;
  const LpResult a = solve_lp(lp);
  const LpResult b = solve_lp(lp);
  REQUIRE(a.status == LpStatus::optimal);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
}
