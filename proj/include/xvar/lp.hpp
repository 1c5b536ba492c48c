#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <xvar/errors.hpp>

namespace xvar {

// Dense standard-form linear program: minimize c'x subject to Ax = b, x >= 0.
// Two-phase revised simplex; the basis is refactorized (LU) every iteration,
// which is cheap at the row counts seen here (constraint families, not
// discretized PDEs). Pivoting is deterministic: Dantzig pricing with
// lowest-index tie-breaks, switching to Bland's rule after a run of
// degenerate steps so cycling cannot occur.

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  double objective = 0;
  Eigen::VectorXd x;  // primal solution, size n
  Eigen::VectorXd y;  // row multipliers, size m
  int iterations = 0;
  int rank = 0;  // redundant rows detected in phase 1 reduce this below m
};

struct LpOptions {
  double tol = 1e-9;         // optimality / feasibility threshold
  double pivot_tol = 1e-10;  // smallest acceptable pivot magnitude
  int bland_after = 100;     // consecutive degenerate pivots before Bland
  int max_iterations = 0;    // 0 = 200 + 50 * (m + n)
};

namespace detail {

class SimplexSolver {
 public:
  SimplexSolver(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                const Eigen::VectorXd& c, const LpOptions& opts)
      : opts_(opts),
        m_(static_cast<int>(A.rows())),
        n_(static_cast<int>(A.cols())) {
    if (b.size() != m_ || c.size() != n_)
      throw InvalidInput("LP dimension mismatch");
    if (m_ == 0 || n_ == 0) throw InvalidInput("empty LP");

    // Column scaling improves pivot selection when objective coefficients
    // span many orders of magnitude (|K|^(1/xi) does). The solution is
    // unscaled on exit; row multipliers are unaffected by column scaling.
    col_scale_.assign(static_cast<std::size_t>(n_), 1.0);
    W_.resize(m_, n_ + m_);
    for (int j = 0; j < n_; ++j) {
      const double norm = A.col(j).norm();
      col_scale_[static_cast<std::size_t>(j)] = norm > 0 ? norm : 1.0;
      W_.col(j) = A.col(j) / col_scale_[static_cast<std::size_t>(j)];
    }

    row_sign_.assign(static_cast<std::size_t>(m_), 1.0);
    b_ = b;
    for (int i = 0; i < m_; ++i)
      if (b_[i] < 0) {
        row_sign_[static_cast<std::size_t>(i)] = -1.0;
        b_[i] = -b_[i];
        W_.row(i).head(n_) = -W_.row(i).head(n_);
      }
    W_.rightCols(m_) = Eigen::MatrixXd::Identity(m_, m_);

    cost_.resize(n_ + m_);
    for (int j = 0; j < n_; ++j) cost_[j] = c[j] / col_scale_[static_cast<std::size_t>(j)];
    cost_.tail(m_).setZero();

    basis_.resize(static_cast<std::size_t>(m_));
    basic_flag_.assign(static_cast<std::size_t>(n_ + m_), 0);
    for (int i = 0; i < m_; ++i) {
      basis_[static_cast<std::size_t>(i)] = n_ + i;
      basic_flag_[static_cast<std::size_t>(n_ + i)] = 1;
    }
    if (opts_.max_iterations <= 0)
      max_iter_ = 200 + 50 * (m_ + n_);
    else
      max_iter_ = opts_.max_iterations;
  }

  LpSolution solve() {
    LpSolution sol;

    // Phase 1: drive the artificial variables (columns n..n+m-1) to zero.
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n_ + m_);
    phase1_cost.tail(m_).setOnes();
    const LpStatus st1 = run(phase1_cost, /*allow_artificial=*/true);
    if (st1 == LpStatus::unbounded)
      throw NumericalError("phase-1 simplex reported unbounded");
    refactorize();
    const Eigen::VectorXd xb = lu_.solve(b_);
    double artificial_level = 0;
    for (int i = 0; i < m_; ++i)
      if (basis_[static_cast<std::size_t>(i)] >= n_)
        artificial_level += std::max(0.0, xb[i]);
    if (artificial_level > opts_.tol * (1.0 + b_.lpNorm<1>())) {
      sol.status = LpStatus::infeasible;
      sol.iterations = iterations_;
      return sol;
    }
    drive_out_artificials();

    const LpStatus st2 = run(cost_, /*allow_artificial=*/false);
    sol.status = st2;
    sol.iterations = iterations_;
    sol.rank = rank_;
    if (st2 != LpStatus::optimal) return sol;

    refactorize();
    const Eigen::VectorXd xbasic = lu_.solve(b_);
    sol.x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[static_cast<std::size_t>(i)];
      if (j < n_)
        sol.x[j] = std::max(0.0, xbasic[i]) / col_scale_[static_cast<std::size_t>(j)];
    }
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[static_cast<std::size_t>(i)]];
    sol.y = lu_.adjoint().solve(cb);
    for (int i = 0; i < m_; ++i) sol.y[i] *= row_sign_[static_cast<std::size_t>(i)];
    sol.objective = 0;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) sol.objective += cost_[j] * std::max(0.0, xbasic[i]);
    }
    return sol;
  }

 private:
  void refactorize() {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = W_.col(basis_[static_cast<std::size_t>(i)]);
    lu_.compute(B);
  }

  // After phase 1 an artificial can linger in the basis at level zero.
  // Pivot it out on any usable column; if its row has no nonzero entry the
  // row is redundant and the artificial stays pinned at zero (feasibility
  // of the remaining rows forces it), so it is simply left in place.
  void drive_out_artificials() {
    rank_ = m_;
    for (int r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < n_) continue;
      refactorize();
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
      e[r] = 1.0;
      const Eigen::VectorXd row = lu_.adjoint().solve(e);
      int enter = -1;
      for (int j = 0; j < n_; ++j) {
        if (in_basis(j)) continue;
        if (std::abs(row.dot(W_.col(j))) > 1e-8) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        --rank_;
        continue;
      }
      replace_basis(r, enter);
    }
    refactorize();
  }

  bool in_basis(int j) const { return basic_flag_[static_cast<std::size_t>(j)] != 0; }

  void replace_basis(int row, int enter) {
    basic_flag_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = 0;
    basis_[static_cast<std::size_t>(row)] = enter;
    basic_flag_[static_cast<std::size_t>(enter)] = 1;
  }

  LpStatus run(const Eigen::VectorXd& cost, bool allow_artificial) {
    int degenerate_run = 0;
    bool bland = false;
    const int limit = allow_artificial ? n_ + m_ : n_;

    while (true) {
      if (++iterations_ > max_iter_)
        throw NumericalError("simplex iteration limit reached (" +
                             std::to_string(max_iter_) + ")");
      refactorize();
      const Eigen::VectorXd xb = lu_.solve(b_);
      Eigen::VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[static_cast<std::size_t>(i)]];
      const Eigen::VectorXd y = lu_.adjoint().solve(cb);

      int enter = -1;
      double best = -opts_.tol;
      for (int j = 0; j < limit; ++j) {
        if (in_basis(j)) continue;
        const double reduced = cost[j] - y.dot(W_.col(j));
        if (bland) {
          if (reduced < -opts_.tol) {
            enter = j;
            break;
          }
        } else if (reduced < best) {
          best = reduced;
          enter = j;
        }
      }
      if (enter < 0) return LpStatus::optimal;

      const Eigen::VectorXd dir = lu_.solve(W_.col(enter));
      int leave = -1;
      double step = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (dir[i] <= opts_.pivot_tol) continue;
        const double ratio = std::max(0.0, xb[i]) / dir[i];
        // Ties prefer evicting artificials, then the lowest variable
        // index; under Bland's rule only the lowest index counts, which
        // is what its termination argument needs.
        if (ratio < step - 1e-13 ||
            (ratio < step + 1e-13 && leave >= 0 &&
             tie_break(basis_[static_cast<std::size_t>(i)], basis_[static_cast<std::size_t>(leave)], bland))) {
          step = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::unbounded;

      if (step < 1e-12) {
        if (++degenerate_run > opts_.bland_after) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      replace_basis(leave, enter);
    }
  }

  bool tie_break(int candidate, int incumbent, bool bland) const {
    if (!bland) {
      const bool cand_art = candidate >= n_, inc_art = incumbent >= n_;
      if (cand_art != inc_art) return cand_art;
    }
    return candidate < incumbent;
  }

  LpOptions opts_;
  int m_, n_;
  Eigen::MatrixXd W_;  // scaled columns plus identity for artificials
  Eigen::VectorXd b_, cost_;
  std::vector<double> col_scale_, row_sign_;
  std::vector<int> basis_;
  std::vector<char> basic_flag_;  // per-variable membership in basis_
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  int iterations_ = 0;
  int max_iter_ = 0;
  int rank_ = 0;
};

}  // namespace detail

inline LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c,
                           const LpOptions& opts = {}) {
  detail::SimplexSolver solver(A, b, c, opts);
  return solver.solve();
}

}  // namespace xvar
