#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <xvar/errors.hpp>
#include <xvar/spectral.hpp>
#include <xvar/subsets.hpp>

namespace xvar {

// Closed-form bounds on the portfolio rho-scale
//   rho_w(H, xi) = ∫ (sum_j w_j u_j^xi)^(1/xi) H(du)
// over spectral measures H with standardized margins. chi = rho^xi is the
// limiting ratio VaR_q(sum w_j X_j) / VaR_q(X_1) as q -> 1.

struct RhoBounds {
  double lower = 0;
  double upper = 0;
};

inline double chi_from_rho(double rho, double xi) {
  if (!(xi > 0)) throw InvalidInput("xi must be positive");
  if (rho < 0) throw InvalidInput("rho must be nonnegative");
  return std::pow(rho, xi);
}

inline double var_bound(double chi, double baseline) { return chi * baseline; }

namespace detail {

inline void check_xi_unit(double xi) {
  if (!(xi > 0) || xi > 1)
    throw InvalidInput("constrained bounds require xi in (0, 1], got " +
                       std::to_string(xi));
}

// The scalar bound formulas hold for any d >= 1; only the explicit measure
// constructors below need the bitmask dimension cap.
inline void check_d_positive(int d) {
  if (d < 1)
    throw InvalidInput("dimension d must be positive, got " + std::to_string(d));
}

// Clamps theta into [1, d] within tolerance; rejects values further out.
inline double clamp_theta(int d, double theta) {
  constexpr double tol = 1e-9;
  if (theta < 1.0 - tol || theta > d + tol)
    throw InvalidInput("d-variate coefficient " + std::to_string(theta) +
                       " outside [1, " + std::to_string(d) + "]");
  return std::min(std::max(theta, 1.0), static_cast<double>(d));
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<double>(r);
}

}  // namespace detail

// Dependence-free bounds: independence gives rho = sum_j w_j^(1/xi),
// complete dependence gives rho = (sum_j w_j)^(1/xi). For xi < 1 the
// independent end is the minimum; for xi > 1 the two ends swap
// (anti-diversification), and at xi = 1 they coincide.
inline RhoBounds frechet_rho(const std::vector<double>& w, double xi) {
  if (!(xi > 0)) throw InvalidInput("xi must be positive");
  if (w.empty()) throw InvalidInput("empty weight vector");
  double indep = 0, sum = 0;
  for (double wj : w) {
    if (wj < 0) throw InvalidInput("portfolio weights must be nonnegative");
    indep += std::pow(wj, 1.0 / xi);
    sum += wj;
  }
  const double dep = std::pow(sum, 1.0 / xi);
  RhoBounds b;
  b.lower = std::min(indep, dep);
  b.upper = std::max(indep, dep);
  return b;
}

// The lower bound L(theta) is piecewise linear in theta across the bins
// B_k = [d/(k+1), d/k), k = 1..d-1. Writing lambda for the position of
// theta inside its bin,
//   L = d * (lambda k^(1/xi-1) + (1-lambda) (k+1)^(1/xi-1)),
// attained by the two-layer Tawn-Molchanov measure on |K| in {k, k+1}.
struct LowerBoundBin {
  int k = 1;
  double lambda = 0;  // 1 at theta = d/k, 0 at theta = d/(k+1)
};

inline LowerBoundBin lower_bound_bin(int d, double theta) {
  detail::check_d_positive(d);
  theta = detail::clamp_theta(d, theta);
  LowerBoundBin bin;
  if (d == 1) return {1, 1.0};
  int k = static_cast<int>(std::ceil(d / theta)) - 1;
  k = std::min(std::max(k, 1), d - 1);
  const double lo = static_cast<double>(d) / (k + 1);
  const double hi = static_cast<double>(d) / k;
  bin.k = k;
  bin.lambda = (theta / d - 1.0 / (k + 1)) / (1.0 / k - 1.0 / (k + 1));
  if (theta <= lo) bin.lambda = 0.0;
  if (theta >= hi) bin.lambda = 1.0;
  return bin;
}

inline double lower_bound_rho(int d, double xi, double theta) {
  detail::check_xi_unit(xi);
  const LowerBoundBin bin = lower_bound_bin(d, theta);
  const double e = 1.0 / xi - 1.0;
  return d * (bin.lambda * std::pow(bin.k, e) +
              (1.0 - bin.lambda) * std::pow(bin.k + 1, e));
}

// U(theta) = (theta^xi + (d-1)^(1-xi) (d-theta)^xi)^(1/xi), attained by a
// symmetric d-atom measure concentrating theta/d on one coordinate.
inline double upper_bound_rho(int d, double xi, double theta) {
  detail::check_d_positive(d);
  detail::check_xi_unit(xi);
  theta = detail::clamp_theta(d, theta);
  if (d == 1) return 1.0;
  const double spread = (d > 1 && theta < d)
                            ? std::pow(d - 1.0, 1.0 - xi) * std::pow(d - theta, xi)
                            : 0.0;
  return std::pow(std::pow(theta, xi) + spread, 1.0 / xi);
}

inline RhoBounds theta_bound_rho(int d, double xi, double theta) {
  return {lower_bound_rho(d, xi, theta), upper_bound_rho(d, xi, theta)};
}

// Derivative of U in theta, used by optimality certificates. Unbounded at
// theta = d when xi < 1.
inline double upper_bound_derivative(int d, double xi, double theta) {
  detail::check_d_positive(d);
  detail::check_xi_unit(xi);
  theta = detail::clamp_theta(d, theta);
  if (d == 1) return 0.0;
  if (theta >= d) throw InvalidInput("U'(theta) diverges at theta = d");
  const double c = std::pow(d - 1.0, 1.0 - xi);
  const double inner = std::pow(theta, xi) + c * std::pow(d - theta, xi);
  return std::pow(inner, 1.0 / xi - 1.0) *
         (std::pow(theta, xi - 1.0) - c * std::pow(d - theta, xi - 1.0));
}

// Explicit minimizer: Tawn-Molchanov measure spreading mass lambda*d over
// the size-k layer and (1-lambda)*d over the size-(k+1) layer, atoms
// 1_K / |K|. Enumerating a layer needs binomial(d, k) atoms, so explicit
// construction is limited to d <= 14.
inline DiscreteSpectralMeasure lower_bound_measure(int d, double theta) {
  check_dimension(d);
  if (d > 14)
    throw InvalidInput("explicit minimizing measure limited to d <= 14");
  theta = detail::clamp_theta(d, theta);
  const LowerBoundBin bin = lower_bound_bin(d, theta);
  DiscreteSpectralMeasure H;
  H.d = d;
  auto add_layer = [&](int k, double layer_mass) {
    if (layer_mass <= 1e-14) return;
    const double per_atom = layer_mass / detail::binomial(d, k);
    for (SubsetId K : enumerate_subsets(d)) {
      if (subset_size(K) != k) continue;
      SpectralAtom a;
      a.u.assign(static_cast<std::size_t>(d), 0.0);
      for (int j : subset_elements(K)) a.u[static_cast<std::size_t>(j - 1)] = 1.0 / k;
      a.h = per_atom;
      H.atoms.push_back(std::move(a));
    }
  };
  add_layer(bin.k, bin.lambda * d);
  add_layer(bin.k + 1, (1.0 - bin.lambda) * d);
  return H;
}

// Explicit maximizer: d atoms of mass 1; atom k puts theta/d on coordinate
// k and spreads the rest evenly.
inline DiscreteSpectralMeasure upper_bound_measure(int d, double theta) {
  detail::check_d_positive(d);
  theta = detail::clamp_theta(d, theta);
  DiscreteSpectralMeasure H;
  H.d = d;
  const double peak = theta / d;
  const double rest = d > 1 ? (d - theta) / (static_cast<double>(d) * (d - 1)) : 0.0;
  for (int k = 0; k < d; ++k) {
    SpectralAtom a;
    a.u.assign(static_cast<std::size_t>(d), rest);
    a.u[static_cast<std::size_t>(k)] = peak;
    a.h = 1.0;
    H.atoms.push_back(std::move(a));
  }
  return H;
}

}  // namespace xvar
