#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <xvar/errors.hpp>

namespace xvar {

// Lawson-Hanson active-set solver for
//   minimize ||b - A x||^2 + ridge * ||x||^2   subject to x >= 0.
// The ridge term keeps the normal equations well posed when A has many
// more columns than rows, the usual shape in coefficient calibration.

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0;  // ||b - A x||, ridge term excluded
  double kkt_residual = 0;   // largest gradient violation at exit
  int iterations = 0;
};

inline NnlsResult solve_nnls(const Eigen::MatrixXd& A,
                             const Eigen::VectorXd& b, double ridge = 0.0,
                             double tol = 1e-8, int max_iter_factor = 50) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m) throw InvalidInput("NNLS dimension mismatch");
  if (ridge < 0) throw InvalidInput("ridge must be nonnegative");

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  std::vector<int> passive_idx;
  const double scale = std::max(1.0, (A.transpose() * b).cwiseAbs().maxCoeff());
  const int max_iter = max_iter_factor * std::max(1, n);
  int iter = 0;

  // Gradient of the (halved) objective, Lawson-Hanson sign convention:
  // w = A'(b - Ax) - ridge x; a positive entry outside the passive set
  // means the objective still decreases by releasing that coordinate.
  auto gradient = [&]() -> Eigen::VectorXd {
    return A.transpose() * (b - A * x) - ridge * x;
  };

  // Unconstrained least squares restricted to the passive columns.
  auto restricted_solve = [&]() -> Eigen::VectorXd {
    const int p = static_cast<int>(passive_idx.size());
    Eigen::MatrixXd Ap(m, p);
    for (int k = 0; k < p; ++k) Ap.col(k) = A.col(passive_idx[static_cast<std::size_t>(k)]);
    Eigen::MatrixXd G = Ap.transpose() * Ap;
    G.diagonal().array() += ridge;
    return G.ldlt().solve(Ap.transpose() * b);
  };

  while (true) {
    const Eigen::VectorXd w = gradient();
    int enter = -1;
    double best = tol * scale;
    for (int j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && !blocked[static_cast<std::size_t>(j)] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    if (enter < 0) break;

    passive[static_cast<std::size_t>(enter)] = 1;
    passive_idx.push_back(enter);

    bool first_pass = true;
    while (true) {
      if (++iter > max_iter)
        throw NumericalError("NNLS iteration limit reached (" +
                             std::to_string(max_iter) + ")");
      const Eigen::VectorXd z = restricted_solve();
      // Numerical guard from the original algorithm: a freshly released
      // coordinate whose unconstrained value is nonpositive gets blocked
      // instead of driving a zero-length line search.
      if (first_pass && z[static_cast<int>(passive_idx.size()) - 1] <= 0) {
        passive[static_cast<std::size_t>(enter)] = 0;
        blocked[static_cast<std::size_t>(enter)] = 1;
        passive_idx.pop_back();
        break;
      }
      first_pass = false;
      double alpha = 1.0;
      for (std::size_t k = 0; k < passive_idx.size(); ++k)
        if (z[static_cast<int>(k)] <= 0) {
          const double xk = x[passive_idx[k]];
          const double a = xk / (xk - z[static_cast<int>(k)]);
          alpha = std::min(alpha, a);
        }
      if (alpha >= 1.0) {
        for (std::size_t k = 0; k < passive_idx.size(); ++k)
          x[passive_idx[k]] = z[static_cast<int>(k)];
        std::fill(blocked.begin(), blocked.end(), 0);
        break;
      }
      for (std::size_t k = 0; k < passive_idx.size(); ++k) {
        const int j = passive_idx[k];
        x[j] += alpha * (z[static_cast<int>(k)] - x[j]);
      }
      // Drop every passive coordinate pinned at (numerical) zero.
      std::vector<int> keep;
      for (int j : passive_idx) {
        if (x[j] <= 1e-12 * scale) {
          x[j] = 0;
          passive[static_cast<std::size_t>(j)] = 0;
        } else {
          keep.push_back(j);
        }
      }
      passive_idx = std::move(keep);
      if (passive_idx.empty()) break;
    }
  }

  NnlsResult res;
  res.x = x;
  res.residual_norm = (b - A * x).norm();
  const Eigen::VectorXd w = gradient();
  double kkt = 0;
  for (int j = 0; j < n; ++j)
    kkt = std::max(kkt, passive[static_cast<std::size_t>(j)] ? std::abs(w[j]) : std::max(0.0, w[j]));
  res.kkt_residual = kkt;
  res.iterations = iter;
  return res;
}

}  // namespace xvar
