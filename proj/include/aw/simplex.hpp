#pragma once

#include <vector>

#include "aw/types.hpp"

namespace aw {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

/// minimize objective . x
///   subject to  eq_A x  = eq_b
///               ub_A x <= ub_b
///               lower <= x <= upper   (entries may be +-infinity)
struct LinearProgram {
  Vector objective;
  Matrix eq_A;
  Vector eq_b;
  Matrix ub_A;
  Vector ub_b;
  Vector lower;
  Vector upper;

  static LinearProgram with_variables(Index n);
  Index variable_count() const { return objective.size(); }
  void check_shapes() const;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Scalar value = 0;
  Vector x;
  long iterations = 0;
};

/// Dense two-phase simplex.  Deterministic: entering variable by most
/// negative reduced cost with lowest-index tie-breaking; leaving row by
/// the lexicographic ratio test over (rhs, basis-inverse block), which
/// rules out cycling and keeps the heavily degenerate transport systems
/// moving.
LpResult solve_lp(const LinearProgram& lp);

namespace detail {

/// Core tableau solver for the standard form
///     min c.x   s.t.  A x = b,  x >= 0
/// (b >= 0 is arranged per row on construction).  Artificial variables
/// are implicit: they start basic, never re-enter, and rows whose
/// artificial cannot be pivoted out are dropped as redundant.  The
/// tableau carries B^{-1} explicitly for the lexicographic rule.
template <typename S>
class DenseSimplex {
 public:
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  DenseSimplex(Mat A, Vec b, Vec c)
      : m_(A.rows()), n_(A.cols()), rhs_(n_), inv0_(n_ + 1), c_(std::move(c)) {
    tab_ = Mat::Zero(m_, n_ + 1 + m_);
    tab_.leftCols(n_) = A;
    tab_.col(rhs_) = b;
    for (Index i = 0; i < m_; ++i) {
      // Equilibrate: rows built from probability products can sit orders
      // of magnitude apart, which wrecks the ratio test.
      const S scale = tab_.row(i).head(n_).cwiseAbs().maxCoeff();
      if (scale > S(0)) tab_.row(i).head(n_ + 1) /= scale;
      if (tab_(i, rhs_) < S(0)) tab_.row(i).head(n_ + 1) = -tab_.row(i).head(n_ + 1);
      tab_(i, inv0_ + i) = S(1);
    }
    basis_.assign(static_cast<size_t>(m_), -1);
    active_.assign(static_cast<size_t>(m_), true);
    for (Index i = 0; i < m_; ++i) basis_[i] = static_cast<Index>(n_ + i);
  }

  LpStatus solve() {
    rebuild_reduced(true);
    LpStatus st = iterate(true);
    if (st == LpStatus::iteration_limit) return st;
    if (-red_rhs_ > feas_tol_) return LpStatus::infeasible;
    cleanup_artificials();

    rebuild_reduced(false);
    return iterate(false);
  }

  Vec solution() const {
    Vec x = Vec::Zero(n_);
    for (Index i = 0; i < m_; ++i)
      if (active_[i] && basis_[i] < n_)
        x[basis_[i]] = std::max(tab_(i, rhs_), S(0));
    return x;
  }

  S objective() const { return c_.dot(solution()); }
  long iterations() const { return iters_; }

 private:
  void pivot(Index r, Index s) {
    tab_.row(r) /= tab_(r, s);
    for (Index i = 0; i < m_; ++i) {
      if (i == r || !active_[i]) continue;
      const S f = tab_(i, s);
      if (f != S(0)) tab_.row(i) -= f * tab_.row(r);
    }
    const S f = red_[s];
    if (f != S(0)) {
      red_ -= f * tab_.row(r).head(n_).transpose();
      red_rhs_ -= f * tab_(r, rhs_);
    }
    basis_[r] = s;
    ++iters_;
  }

  Index entering() const {
    Index best = -1;
    S most = -opt_tol_;
    for (Index j = 0; j < n_; ++j) {
      if (red_[j] < most) {
        most = red_[j];
        best = j;
      }
    }
    return best;
  }

  // Lexicographic ratio test: minimize rhs_i / a_is, ties resolved by
  // the first differing column of the scaled basis-inverse block.  Rows
  // of B^{-1} are independent, so full ties cannot happen and every
  // degenerate pivot still makes lexicographic progress.
  Index leaving(Index s) const {
    Index r = -1;
    for (Index i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const S a = tab_(i, s);
      if (a <= pivot_tol_) continue;
      if (r < 0) {
        r = i;
        continue;
      }
      const S ar = tab_(r, s);
      const S diff = tab_(i, rhs_) / a - tab_(r, rhs_) / ar;
      const S tie = S(1e-12) * (S(1) + std::abs(tab_(r, rhs_) / ar));
      if (diff < -tie) {
        r = i;
      } else if (diff <= tie) {
        for (Index k = 0; k < m_; ++k) {
          const S lex = tab_(i, inv0_ + k) / a - tab_(r, inv0_ + k) / ar;
          if (std::abs(lex) > S(1e-12)) {
            if (lex < S(0)) r = i;
            break;
          }
        }
      }
    }
    return r;
  }

  // Reduced costs recomputed from the current basis; incremental cost-row
  // updates drift after many dense pivots, and optimality or
  // infeasibility must never be declared off stale data.
  void rebuild_reduced(bool phase1) {
    if (phase1) {
      red_ = Vec::Zero(n_);
      red_rhs_ = S(0);
      for (Index i = 0; i < m_; ++i) {
        if (!active_[i] || basis_[i] < n_) continue;
        red_ -= tab_.row(i).head(n_).transpose();
        red_rhs_ -= tab_(i, rhs_);
      }
    } else {
      red_ = c_;
      red_rhs_ = S(0);
      for (Index i = 0; i < m_; ++i) {
        if (!active_[i] || basis_[i] >= n_) continue;
        const S cb = c_[basis_[i]];
        if (cb != S(0)) {
          red_ -= cb * tab_.row(i).head(n_).transpose();
          red_rhs_ -= cb * tab_(i, rhs_);
        }
      }
    }
    for (Index i = 0; i < m_; ++i)
      if (active_[i] && basis_[i] < n_) red_[basis_[i]] = S(0);
  }

  LpStatus iterate(bool phase1) {
    const long limit = 50000 + 400 * static_cast<long>(m_ + n_);
    long since_rebuild = 0;
    while (true) {
      if (iters_ > limit) return LpStatus::iteration_limit;
      if (++since_rebuild > 500) {
        rebuild_reduced(phase1);
        since_rebuild = 0;
      }
      Index s = entering();
      if (s < 0) {
        // Confirm optimality against freshly computed reduced costs.
        rebuild_reduced(phase1);
        since_rebuild = 0;
        s = entering();
        if (s < 0) return LpStatus::optimal;
      }
      const Index r = leaving(s);
      if (r < 0) return phase1 ? LpStatus::infeasible : LpStatus::unbounded;
      pivot(r, s);
    }
  }

  void cleanup_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (!active_[i] || basis_[i] < n_) continue;
      // Pivot the artificial out on the largest available element; a
      // tiny pivot here would poison the rest of the tableau.
      Index s = -1;
      S best = S(1e-7);
      for (Index j = 0; j < n_; ++j) {
        if (std::abs(tab_(i, j)) > best) {
          best = std::abs(tab_(i, j));
          s = j;
        }
      }
      if (s >= 0)
        pivot(i, s);
      else
        active_[i] = false;  // redundant constraint row
    }
  }

  Index m_, n_;
  Index rhs_;   // column index of the right-hand side
  Index inv0_;  // first column of the basis-inverse block
  Vec c_;
  Mat tab_;
  Vec red_;
  S red_rhs_ = S(0);
  std::vector<Index> basis_;
  std::vector<bool> active_;
  long iters_ = 0;

  static constexpr S opt_tol_ = S(1e-9);
  static constexpr S pivot_tol_ = S(1e-11);
  static constexpr S feas_tol_ = S(1e-8);
};

}  // namespace detail

}  // namespace aw
