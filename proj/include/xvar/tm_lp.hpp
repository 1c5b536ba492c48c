#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <xvar/closed_form.hpp>
#include <xvar/errors.hpp>
#include <xvar/lp.hpp>
#include <xvar/spectral.hpp>
#include <xvar/subsets.hpp>

namespace xvar {

// The constrained lower bound on rho is attained inside the Tawn-Molchanov
// class: spectral measures charging only the points u_K = 1_K / |K|. With
// mass variables beta_K >= 0 this turns the semi-infinite problem into
//   minimize sum_K |K|^(1/xi) beta_K
//   s.t.     sum_{K: K∩J≠∅} beta_K = c_J   for every J in the family.
// Columns run over all non-empty K in (size, mask) order.

struct TmLp {
  int d = 0;
  double xi = 0;
  SubsetFamily family;
  std::vector<SubsetId> columns;
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  Eigen::VectorXd cost;
};

inline TmLp build_tm_lp(const SubsetFamily& family, double xi,
                        int max_dim = 14) {
  if (!(xi > 0) || xi > 1)
    throw InvalidInput("Tawn-Molchanov program requires xi in (0, 1]");
  check_dimension(family.d);
  if (family.d > max_dim)
    throw InvalidInput("dimension " + std::to_string(family.d) +
                       " exceeds the dense column cap (" +
                       std::to_string(max_dim) + ")");
  family.require_constraint_form();

  TmLp lp;
  lp.d = family.d;
  lp.xi = xi;
  lp.family = family;
  lp.columns = enumerate_subsets(family.d);
  const int m = static_cast<int>(family.size());
  const int n = static_cast<int>(lp.columns.size());
  lp.A.resize(m, n);
  lp.rhs.resize(m);
  lp.cost.resize(n);
  for (int col = 0; col < n; ++col)
    lp.cost[col] = std::pow(static_cast<double>(subset_size(lp.columns[static_cast<std::size_t>(col)])),
                            1.0 / xi);
  for (int row = 0; row < m; ++row) {
    const SubsetId J = family.sets[static_cast<std::size_t>(row)];
    lp.rhs[row] = family.values[static_cast<std::size_t>(row)];
    for (int col = 0; col < n; ++col)
      lp.A(row, col) = (J & lp.columns[static_cast<std::size_t>(col)]) ? 1.0 : 0.0;
  }
  return lp;
}

struct TmSolution {
  double rho = 0;
  double chi = 0;
  MobiusWeights beta;
  DiscreteSpectralMeasure measure;  // atoms with positive mass only
  LpSolution lp;
};

inline TmSolution solve_lower_bound(const SubsetFamily& family, double xi,
                                    const LpOptions& opts = {},
                                    int max_dim = 14) {
  const TmLp prog = build_tm_lp(family, xi, max_dim);
  TmSolution sol;
  sol.lp = solve_lp(prog.A, prog.rhs, prog.cost, opts);
  if (sol.lp.status == LpStatus::infeasible)
    throw InconsistentInput(
        "no spectral measure matches the coefficient constraints");
  if (sol.lp.status == LpStatus::unbounded)
    throw NumericalError("Tawn-Molchanov program reported unbounded");

  sol.rho = sol.lp.objective;
  sol.chi = chi_from_rho(sol.rho, xi);
  sol.beta.d = prog.d;
  sol.beta.beta.assign(full_set(prog.d), 0.0);
  sol.measure.d = prog.d;
  for (std::size_t col = 0; col < prog.columns.size(); ++col) {
    const double bk = sol.lp.x[static_cast<int>(col)];
    const SubsetId K = prog.columns[col];
    sol.beta.beta[K - 1] = bk;
    if (bk <= 1e-11) continue;
    SpectralAtom a;
    const int size = subset_size(K);
    a.u.assign(static_cast<std::size_t>(prog.d), 0.0);
    for (int j : subset_elements(K)) a.u[static_cast<std::size_t>(j - 1)] = 1.0 / size;
    a.h = size * bk;
    sol.measure.atoms.push_back(std::move(a));
  }
  return sol;
}

// Explicit multiplier vector over the complete family:
//   x~_J = sum_{L ⊆ J} (-1)^(|L|+1) |J^c ∪ L|^(1/xi),
// the L = ∅ term contributing -|J^c|^(1/xi) (and 0 for J = D).
inline double tm_dual_coordinate(SubsetId J, int d, double xi) {
  check_dimension(d);
  if (!(xi > 0)) throw InvalidInput("xi must be positive");
  const SubsetId comp = full_set(d) & ~J;
  double acc = 0.0;
  SubsetId L = J;
  while (true) {
    const int card = subset_size(comp | L);
    const double term = card > 0 ? std::pow(static_cast<double>(card), 1.0 / xi) : 0.0;
    acc += (subset_size(L) & 1) ? term : -term;
    if (L == 0) break;
    L = (L - 1) & J;
  }
  return acc;
}

inline std::vector<double> tm_dual_vector(int d, double xi) {
  std::vector<double> x;
  for (SubsetId J : enumerate_subsets(d))
    x.push_back(tm_dual_coordinate(J, d, xi));
  return x;
}

// Sorted-coordinate form of sum_J max_{j in J} u_j x~_J: with u_(1) <= ...
// <= u_(d) the alternating sums telescope to
//   sum_j (d+1-j)^(1/xi) (u_(j) - u_(j-1)),   u_(0) := 0,
// which reverse Minkowski bounds by (sum_j u_j^xi)^(1/xi) for xi <= 1.
inline double sorted_increment_form(std::vector<double> u, double xi) {
  if (!(xi > 0)) throw InvalidInput("xi must be positive");
  std::sort(u.begin(), u.end());
  const int d = static_cast<int>(u.size());
  double acc = 0, prev = 0;
  for (int j = 1; j <= d; ++j) {
    acc += std::pow(static_cast<double>(d + 1 - j), 1.0 / xi) * (u[static_cast<std::size_t>(j - 1)] - prev);
    prev = u[static_cast<std::size_t>(j - 1)];
  }
  return acc;
}

// Optimality certificate for a family-constrained bound: a multiplier per
// constraint plus a discrete measure of dual masses.
struct KktCertificate {
  std::vector<double> x;             // aligned with family order
  DiscreteSpectralMeasure support;   // mass-carrying atoms
};

struct KktReport {
  bool pass = false;
  double dual_feasibility = 0;   // max |sum_k y_k a_J(u_k) - c_J|
  double complementary = 0;      // max |a(u_k)'x - b(u_k)| over atoms
  double primal_feasibility = 0; // max violation of a(u)'x <= b(u) (lower)
  double value_gap = 0;          // |c'x - sum_k y_k b(u_k)|
  std::size_t samples = 0;
};

namespace detail {

inline double kkt_a_dot_x(const SubsetFamily& family,
                          const std::vector<double>& x,
                          const std::vector<double>& u) {
  double acc = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    double mx = 0;
    SubsetId s = family.sets[i];
    for (int j = 0; s != 0; ++j, s >>= 1)
      if (s & 1u) mx = std::max(mx, u[static_cast<std::size_t>(j)]);
    acc += mx * x[i];
  }
  return acc;
}

inline double kkt_b(const std::vector<double>& u, double xi) {
  double s = 0;
  for (double uj : u)
    if (uj > 0) s += std::pow(uj, xi);
  return std::pow(s, 1.0 / xi);
}

// Deterministic low-discrepancy stream on the simplex: a Kronecker
// (additive Weyl) sequence in the unit cube pushed through exponential
// spacings, plus the structured points where constraint activity tends
// to concentrate.
inline std::vector<std::vector<double>> simplex_sample(int d, std::size_t n) {
  std::vector<std::vector<double>> pts;
  pts.reserve(n + (d <= 14 ? (std::size_t{1} << d) : 0) + 1);

  // alpha_j = phi^-(j+1) with phi the root of x^(d+1) = x + 1.
  double phi = 1.5;
  for (int it = 0; it < 64; ++it)
    phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  std::vector<double> alpha(static_cast<std::size_t>(d));
  double p = 1.0;
  for (int j = 0; j < d; ++j) {
    p /= phi;
    alpha[static_cast<std::size_t>(j)] = p;
  }
  std::vector<double> state(static_cast<std::size_t>(d), 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> u(static_cast<std::size_t>(d));
    double total = 0;
    for (int j = 0; j < d; ++j) {
      auto& s = state[static_cast<std::size_t>(j)];
      s += alpha[static_cast<std::size_t>(j)];
      if (s >= 1.0) s -= 1.0;
      u[static_cast<std::size_t>(j)] = -std::log1p(-0.999999 * s);
      total += u[static_cast<std::size_t>(j)];
    }
    for (double& uj : u) uj /= total;
    pts.push_back(std::move(u));
  }

  if (d <= 14)
    for (SubsetId K : enumerate_subsets(d)) {
      std::vector<double> u(static_cast<std::size_t>(d), 0.0);
      const int size = subset_size(K);
      for (int j : subset_elements(K)) u[static_cast<std::size_t>(j - 1)] = 1.0 / size;
      pts.push_back(std::move(u));
    }
  return pts;
}

}  // namespace detail

// Checks the three optimality conditions of a bound certificate against a
// constraint family with values c and claimed optimum `value`:
//   (i)   dual feasibility  sum_k y_k a_J(u_k) = c_J for every J,
//   (ii)  complementary slackness a(u_k)'x = b(u_k) on mass-carrying atoms,
//   (iii) primal feasibility a(u)'x <= b(u) across S+ (>= for upper bounds),
// plus the strong-duality identity c'x = sum_k y_k b(u_k) = value.
// Condition (iii) is verified by sampling: a deterministic low-discrepancy
// stream plus every Tawn-Molchanov support point and the atoms themselves.
inline KktReport verify_kkt(const KktCertificate& cert,
                            const SubsetFamily& family, double xi,
                            double value, std::size_t n_samples = 100000,
                            double tol = 1e-7, bool upper = false) {
  if (cert.x.size() != family.size())
    throw InvalidInput("certificate multiplier count != family size");
  const int d = family.d;
  const double scale = std::max(1.0, std::abs(value));

  KktReport rep;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double implied = theta_of_measure(cert.support, family.sets[i]);
    rep.dual_feasibility = std::max(
        rep.dual_feasibility, std::abs(implied - family.values[i]));
  }

  double dual_value = 0;
  for (const auto& atom : cert.support.atoms) {
    const double bu = detail::kkt_b(atom.u, xi);
    dual_value += atom.h * bu;
    if (atom.h > 1e-12)
      rep.complementary = std::max(
          rep.complementary,
          std::abs(detail::kkt_a_dot_x(family, cert.x, atom.u) - bu) / scale);
  }
  double primal_value = 0;
  for (std::size_t i = 0; i < family.size(); ++i)
    primal_value += family.values[i] * cert.x[i];
  rep.value_gap = std::max(std::abs(primal_value - value),
                           std::abs(dual_value - value)) /
                  scale;

  auto pts = detail::simplex_sample(d, n_samples);
  for (const auto& atom : cert.support.atoms) pts.push_back(atom.u);
  for (const auto& u : pts) {
    const double lhs = detail::kkt_a_dot_x(family, cert.x, u);
    const double rhs = detail::kkt_b(u, xi);
    const double violation = upper ? rhs - lhs : lhs - rhs;
    rep.primal_feasibility = std::max(rep.primal_feasibility, violation / scale);
  }
  rep.samples = pts.size();
  rep.pass = rep.dual_feasibility <= tol * scale && rep.complementary <= tol &&
             rep.primal_feasibility <= tol && rep.value_gap <= tol;
  return rep;
}

// The proof construction for the family {singletons, D}: with theta in the
// bin (k, lambda), the multipliers
//   x_singleton = (k+1)^(1/xi) - k^(1/xi),
//   x_D         = (k+1) k^(1/xi) - k (k+1)^(1/xi)
// are feasible, and the two-layer minimizing measure is complementary.
inline KktCertificate lower_bound_certificate(int d, double xi, double theta) {
  detail::check_xi_unit(xi);
  const LowerBoundBin bin = lower_bound_bin(d, theta);
  const double k = bin.k;
  KktCertificate cert;
  const double xs = std::pow(k + 1, 1.0 / xi) - std::pow(k, 1.0 / xi);
  const double xd =
      (k + 1) * std::pow(k, 1.0 / xi) - k * std::pow(k + 1, 1.0 / xi);
  cert.x.assign(static_cast<std::size_t>(d) + 1, xs);
  cert.x.back() = xd;
  cert.support = lower_bound_measure(d, theta);
  return cert;
}

// Family used by lower_bound_certificate, in canonical order.
inline SubsetFamily singleton_full_family(int d, double theta) {
  SubsetFamily f = SubsetFamily::singletons(d);
  f.add(full_set(d), theta);
  f.finalize();
  return f;
}

}  // namespace xvar
