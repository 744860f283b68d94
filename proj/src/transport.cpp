#include "aw/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace aw {

Scalar Coupling::marginal_residual() const {
  const Scalar row = (weights.rowwise().sum() - mu).cwiseAbs().maxCoeff();
  const Scalar col =
      (weights.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff();
  return std::max(row, col);
}

std::string Coupling::to_csv() const {
  std::ostringstream out;
  for (Index i = 0; i < weights.rows(); ++i) {
    for (Index j = 0; j < weights.cols(); ++j) {
      if (j) out << ',';
      out << weights(i, j);
    }
    out << '\n';
  }
  return out.str();
}

TransportResult optimal_transport(const Vector& mu, const Vector& nu,
                                  const Matrix& cost) {
  const Index n = mu.size();
  const Index m = nu.size();
  if (cost.rows() != n || cost.cols() != m)
    throw std::invalid_argument("optimal_transport: cost shape mismatch");

  LinearProgram lp = LinearProgram::with_variables(n * m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) lp.objective[i * m + j] = cost(i, j);
  lp.eq_A = Matrix::Zero(n + m, n * m);
  lp.eq_b.resize(n + m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      lp.eq_A(i, i * m + j) = 1.0;
      lp.eq_A(n + j, i * m + j) = 1.0;
    }
    lp.eq_b[i] = mu[i];
  }
  for (Index j = 0; j < m; ++j) lp.eq_b[n + j] = nu[j];

  const LpResult r = solve_lp(lp);
  TransportResult out;
  out.status = r.status;
  if (r.status != LpStatus::optimal) return out;
  out.value = r.value;
  out.coupling.mu = mu;
  out.coupling.nu = nu;
  out.coupling.weights.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      out.coupling.weights(i, j) = std::max(r.x[i * m + j], 0.0);
  return out;
}

TransportResult wasserstein(const DiscreteDistribution& mu,
                            const DiscreteDistribution& nu, Scalar p) {
  if (p < 1) throw std::invalid_argument("wasserstein: p must be >= 1");
  const Vector xs = mu.values();
  const Vector ys = nu.values();
  Matrix cost(xs.size(), ys.size());
  for (Index i = 0; i < xs.size(); ++i)
    for (Index j = 0; j < ys.size(); ++j)
      cost(i, j) = std::pow(std::abs(xs[i] - ys[j]), p);
  TransportResult r = optimal_transport(mu.weights(), nu.weights(), cost);
  if (r.status == LpStatus::optimal)
    r.value = std::pow(std::max(r.value, 0.0), 1.0 / p);
  return r;
}

TransportResult wasserstein(const PathLaw& P, const PathLaw& Q, Scalar p) {
  if (p < 1) throw std::invalid_argument("wasserstein: p must be >= 1");
  if (P.horizon != Q.horizon)
    throw std::invalid_argument("wasserstein: horizon mismatch");
  Matrix cost(P.path_count(), Q.path_count());
  for (Index i = 0; i < P.path_count(); ++i)
    for (Index j = 0; j < Q.path_count(); ++j)
      cost(i, j) = std::pow(P.sup_distance(i, Q, j), p);
  TransportResult r = optimal_transport(P.probs, Q.probs, cost);
  if (r.status == LpStatus::optimal)
    r.value = std::pow(std::max(r.value, 0.0), 1.0 / p);
  return r;
}

namespace detail {

std::vector<std::tuple<Index, Index, Scalar>> product_cost_vertex(
    const Vector& a, const Vector& b, const Vector& mu, const Vector& nu) {
  const Index n = mu.size();
  const Index m = nu.size();
  std::vector<Index> ri(n), cj(m);
  std::iota(ri.begin(), ri.end(), 0);
  std::iota(cj.begin(), cj.end(), 0);
  std::sort(ri.begin(), ri.end(), [&](Index i, Index k) {
    return a[i] != a[k] ? a[i] < a[k] : i < k;
  });
  std::sort(cj.begin(), cj.end(), [&](Index j, Index k) {
    return b[j] != b[k] ? b[j] > b[k] : j < k;
  });

  std::vector<std::tuple<Index, Index, Scalar>> vertex;
  Index i = 0, j = 0;
  Scalar row_left = mu[ri[0]];
  Scalar col_left = nu[cj[0]];
  while (true) {
    const Scalar mass = std::min(row_left, col_left);
    if (mass > 0) vertex.emplace_back(ri[i], cj[j], mass);
    row_left -= mass;
    col_left -= mass;
    const bool advance_row = row_left <= col_left;
    if (advance_row) {
      if (++i >= n) break;
      row_left = mu[ri[i]];
    } else {
      if (++j >= m) break;
      col_left = nu[cj[j]];
    }
  }
  return vertex;
}

}  // namespace detail

namespace {

struct QuadraticWeakOt {
  // f(gamma) = sum_i (c_i - r_i)^2 / mu_i  with  r_i = sum_j y_j gamma_ij,
  // c_i = mu_i x_i.  Gradient w.r.t. gamma_ij factorizes as u_i * y_j.
  Vector mu, nu, xs, ys, c;

  Scalar f(const Vector& r) const {
    Scalar s = 0;
    for (Index i = 0; i < mu.size(); ++i) {
      const Scalar d = c[i] - r[i];
      s += d * d / mu[i];
    }
    return s;
  }

  Vector grad_u(const Vector& r) const {
    Vector u(mu.size());
    for (Index i = 0; i < mu.size(); ++i) u[i] = -2.0 * (c[i] - r[i]) / mu[i];
    return u;
  }
};

struct SparseVertex {
  std::vector<std::tuple<Index, Index, Scalar>> entries;
  Vector r;  // row image sum_j y_j v_ij
  Scalar lambda = 0;

  bool same_support(const SparseVertex& o) const {
    return entries == o.entries;
  }
};

Vector vertex_row_image(const std::vector<std::tuple<Index, Index, Scalar>>& v,
                        const Vector& ys, Index n) {
  Vector r = Vector::Zero(n);
  for (const auto& [i, j, w] : v) r[i] += ys[j] * w;
  return r;
}

WeakTransportResult weak_ot_quadratic(const DiscreteDistribution& mu,
                                      const DiscreteDistribution& nu) {
  QuadraticWeakOt prob;
  prob.mu = mu.weights();
  prob.nu = nu.weights();
  prob.xs = mu.values();
  prob.ys = nu.values();
  prob.c = prob.mu.cwiseProduct(prob.xs);
  const Index n = prob.mu.size();
  const Index m = prob.nu.size();

  // Start from the product coupling.
  Matrix gamma = prob.mu * prob.nu.transpose();
  Vector r = gamma * prob.ys;
  std::vector<SparseVertex> active;
  {
    SparseVertex v0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j)
        v0.entries.emplace_back(i, j, prob.mu[i] * prob.nu[j]);
    v0.r = r;
    v0.lambda = 1.0;
    active.push_back(std::move(v0));
  }

  const long max_iters = 100000;
  const Scalar gap_tol = 1e-11;
  WeakTransportResult out;

  long it = 0;
  Scalar gap = kInfinity;
  for (; it < max_iters; ++it) {
    const Vector u = prob.grad_u(r);
    auto fw_entries = detail::product_cost_vertex(u, prob.ys, prob.mu, prob.nu);
    Vector r_fw = vertex_row_image(fw_entries, prob.ys, n);
    gap = u.dot(r - r_fw);
    if (gap <= gap_tol) break;

    // Away vertex: active vertex with the largest gradient inner product.
    std::erase_if(active,
                  [](const SparseVertex& v) { return v.lambda <= 1e-15; });
    size_t away_idx = 0;
    Scalar away_score = -kInfinity;
    for (size_t k = 0; k < active.size(); ++k) {
      const Scalar s = u.dot(active[k].r);
      if (s > away_score) {
        away_score = s;
        away_idx = k;
      }
    }

    const Scalar fw_score = u.dot(r) - u.dot(r_fw);
    const Scalar aw_score = away_score - u.dot(r);
    Vector dr;
    Scalar t_max;
    bool is_away;
    if (fw_score >= aw_score) {
      is_away = false;
      dr = r_fw - r;
      t_max = 1.0;
    } else {
      is_away = true;
      dr = r - active[away_idx].r;
      const Scalar lam = active[away_idx].lambda;
      t_max = lam / (1.0 - lam);
      if (!std::isfinite(t_max)) t_max = 1e12;
    }

    // Exact line search for the quadratic objective.
    Scalar num = 0, den = 0;
    for (Index i = 0; i < n; ++i) {
      num += (prob.c[i] - r[i]) * dr[i] / prob.mu[i];
      den += dr[i] * dr[i] / prob.mu[i];
    }
    Scalar t = den > 0 ? num / den : t_max;
    t = std::clamp(t, 0.0, t_max);
    if (t <= 0) break;  // no further progress possible along either direction

    if (!is_away) {
      for (auto& v : active) v.lambda *= (1.0 - t);
      gamma *= (1.0 - t);
      for (const auto& [i, j, w] : fw_entries) gamma(i, j) += t * w;
      bool found = false;
      for (auto& v : active) {
        if (v.entries == fw_entries) {
          v.lambda += t;
          found = true;
          break;
        }
      }
      if (!found) {
        SparseVertex v;
        v.entries = std::move(fw_entries);
        v.r = std::move(r_fw);
        v.lambda = t;
        active.push_back(std::move(v));
      }
    } else {
      for (auto& v : active) v.lambda *= (1.0 + t);
      active[away_idx].lambda -= t;
      gamma *= (1.0 + t);
      for (const auto& [i, j, w] : active[away_idx].entries)
        gamma(i, j) -= t * w;
      if (active[away_idx].lambda < 1e-14)
        active.erase(active.begin() + static_cast<long>(away_idx));
    }
    gamma = gamma.cwiseMax(0.0);
    r = gamma * prob.ys;
  }

  out.iterations = it;
  out.gap = gap;
  out.converged = gap <= 1e-7;
  out.value = std::sqrt(std::max(prob.f(r), 0.0));
  out.coupling.mu = prob.mu;
  out.coupling.nu = prob.nu;
  out.coupling.weights = gamma;
  return out;
}

}  // namespace

WeakTransportResult weak_ot(const DiscreteDistribution& mu,
                            const DiscreteDistribution& nu, int p) {
  if (p != 1 && p != 2)
    throw std::invalid_argument("weak_ot: only p in {1,2} is supported");
  const Index n = mu.size();
  const Index m = nu.size();
  if (n == 0 || m == 0) throw std::invalid_argument("weak_ot: empty input");

  if (p == 2) return weak_ot_quadratic(mu, nu);

  // p = 1: linear program with absolute-value auxiliaries,
  //   minimize sum_i s_i  with  s_i >= +-(mu_i x_i - sum_j y_j gamma_ij).
  const Vector xs = mu.values();
  const Vector ys = nu.values();
  const Vector muw = mu.weights();
  const Vector nuw = nu.weights();

  const Index ng = n * m;
  LinearProgram lp = LinearProgram::with_variables(ng + n);
  for (Index i = 0; i < n; ++i) lp.objective[ng + i] = 1.0;

  lp.eq_A = Matrix::Zero(n + m, ng + n);
  lp.eq_b.resize(n + m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      lp.eq_A(i, i * m + j) = 1.0;
      lp.eq_A(n + j, i * m + j) = 1.0;
    }
    lp.eq_b[i] = muw[i];
  }
  for (Index j = 0; j < m; ++j) lp.eq_b[n + j] = nuw[j];

  lp.ub_A = Matrix::Zero(2 * n, ng + n);
  lp.ub_b.resize(2 * n);
  for (Index i = 0; i < n; ++i) {
    // mu_i x_i - r_i - s_i <= 0  and  r_i - mu_i x_i - s_i <= 0
    for (Index j = 0; j < m; ++j) {
      lp.ub_A(2 * i, i * m + j) = -ys[j];
      lp.ub_A(2 * i + 1, i * m + j) = ys[j];
    }
    lp.ub_A(2 * i, ng + i) = -1.0;
    lp.ub_A(2 * i + 1, ng + i) = -1.0;
    lp.ub_b[2 * i] = -muw[i] * xs[i];
    lp.ub_b[2 * i + 1] = muw[i] * xs[i];
  }

  const LpResult r = solve_lp(lp);
  WeakTransportResult out;
  if (r.status != LpStatus::optimal) {
    out.converged = false;
    return out;
  }
  out.value = std::max(r.value, 0.0);
  out.iterations = r.iterations;
  out.coupling.mu = muw;
  out.coupling.nu = nuw;
  out.coupling.weights.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      out.coupling.weights(i, j) = std::max(r.x[i * m + j], 0.0);
  return out;
}

Scalar weak_ot_bruteforce(const DiscreteDistribution& mu,
                          const DiscreteDistribution& nu) {
  const Index n = mu.size();
  const Index m = nu.size();
  if (n > 4 || m > 4)
    throw std::invalid_argument("weak_ot_bruteforce: supports must be <= 4");
  const Vector xs = mu.values();
  const Vector ys = nu.values();
  const Vector muw = mu.weights();
  const Vector nuw = nu.weights();
  const Index ng = n * m;

  // Marginal constraints A gamma = b (one redundant row kept).
  Matrix A = Matrix::Zero(n + m, ng);
  Vector b(n + m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      A(i, i * m + j) = 1.0;
      A(n + j, i * m + j) = 1.0;
    }
    b[i] = muw[i];
  }
  for (Index j = 0; j < m; ++j) b[n + j] = nuw[j];

  // Hessian of f and linear term: f = sum_i (c_i - y.gamma_i)^2 / mu_i.
  Scalar best = kInfinity;
  for (unsigned long mask = 0; mask < (1ul << ng); ++mask) {
    const Index extra = static_cast<Index>(__builtin_popcountl(mask));
    Matrix C(n + m + extra, ng);
    Vector d(n + m + extra);
    C.topRows(n + m) = A;
    d.head(n + m) = b;
    Index row = n + m;
    for (Index k = 0; k < ng; ++k) {
      if (mask & (1ul << k)) {
        C.row(row).setZero();
        C(row, k) = 1.0;
        d[row++] = 0.0;
      }
    }
    // Feasible particular solution and null space of the face.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(C);
    const Vector g0 = cod.solve(d);
    if ((C * g0 - d).cwiseAbs().maxCoeff() > 1e-10) continue;  // empty face
    Eigen::FullPivLU<Matrix> lu(C);
    const Matrix Z = lu.kernel();

    auto fval = [&](const Vector& g) {
      Scalar s = 0;
      for (Index i = 0; i < n; ++i) {
        Scalar r = 0;
        for (Index j = 0; j < m; ++j) r += ys[j] * g[i * m + j];
        const Scalar dd = muw[i] * xs[i] - r;
        s += dd * dd / muw[i];
      }
      return s;
    };

    Vector gstar = g0;
    if (Z.cols() > 0 && Z.norm() > 0) {
      // Minimize the quadratic over g0 + Z w.
      Matrix Y = Matrix::Zero(n, ng);  // r = Y gamma
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) Y(i, i * m + j) = ys[j];
      Matrix W = Matrix::Zero(n, n);
      for (Index i = 0; i < n; ++i) W(i, i) = 1.0 / muw[i];
      const Matrix YZ = Y * Z;
      const Matrix H = YZ.transpose() * W * YZ;
      Vector resid(n);
      for (Index i = 0; i < n; ++i) {
        Scalar r = 0;
        for (Index j = 0; j < m; ++j) r += ys[j] * g0[i * m + j];
        resid[i] = muw[i] * xs[i] - r;
      }
      const Vector rhs = YZ.transpose() * W * resid;
      Eigen::CompleteOrthogonalDecomposition<Matrix> hsolve(H);
      const Vector w = hsolve.solve(rhs);
      gstar = g0 + Z * w;
    }
    if ((gstar.array() < -1e-9).any()) continue;
    best = std::min(best, fval(gstar));
  }
  return std::sqrt(std::max(best, 0.0));
}

}  // namespace aw
