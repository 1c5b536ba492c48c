#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <xvar/errors.hpp>
#include <xvar/subsets.hpp>

namespace xvar {

struct SpectralAtom {
  std::vector<double> u;  // point on the l1 simplex S+
  double h = 0;           // mass
};

// Discrete spectral measure on S+ = {u >= 0, sum_j u_j = 1}.
// Standardized margins mean ∫ u_j H(du) = 1 for every j, which forces
// total mass H(S+) = d.
struct DiscreteSpectralMeasure {
  int d = 0;
  std::vector<SpectralAtom> atoms;

  double total_mass() const {
    double m = 0;
    for (const auto& a : atoms) m += a.h;
    return m;
  }

  std::vector<double> marginals() const {
    std::vector<double> mu(static_cast<std::size_t>(d), 0.0);
    for (const auto& a : atoms)
      for (int j = 0; j < d; ++j) mu[static_cast<std::size_t>(j)] += a.h * a.u[static_cast<std::size_t>(j)];
    return mu;
  }

  double marginal_defect() const {
    double worst = 0;
    for (double m : marginals()) worst = std::max(worst, std::abs(m - 1.0));
    return worst;
  }

  void validate(double tol = 1e-6) const {
    check_dimension(d);
    for (const auto& a : atoms) {
      if (static_cast<int>(a.u.size()) != d)
        throw InvalidInput("spectral atom has wrong dimension");
      if (a.h < -tol) throw InvalidInput("negative atom mass");
      double s = 0;
      for (double uj : a.u) {
        if (uj < -tol) throw InvalidInput("negative atom coordinate");
        s += uj;
      }
      if (std::abs(s - 1.0) > tol)
        throw InvalidInput("spectral atom off the unit simplex, |u|_1 = " +
                           std::to_string(s));
    }
    if (marginal_defect() > tol)
      throw InconsistentInput("spectral measure margins deviate from 1 by " +
                              std::to_string(marginal_defect()));
  }
};

// rho-scale of the weighted portfolio under measure H:
//   rho_w(H, xi) = ∫ (sum_j w_j u_j^xi)^(1/xi) H(du).
// The extreme VaR ratio is chi = rho^xi.
inline double rho_of_measure(const DiscreteSpectralMeasure& H,
                             const std::vector<double>& w, double xi) {
  if (!(xi > 0))
    throw InvalidInput("xi must be positive, got " + std::to_string(xi));
  if (static_cast<int>(w.size()) != H.d)
    throw InvalidInput("weight vector length != measure dimension");
  double rho = 0;
  for (const auto& a : H.atoms) {
    double s = 0;
    for (int j = 0; j < H.d; ++j) {
      const double uj = a.u[static_cast<std::size_t>(j)];
      if (uj > 0) s += w[static_cast<std::size_t>(j)] * std::pow(uj, xi);
    }
    rho += a.h * std::pow(s, 1.0 / xi);
  }
  return rho;
}

inline double rho_of_measure(const DiscreteSpectralMeasure& H, double xi) {
  return rho_of_measure(H, std::vector<double>(static_cast<std::size_t>(H.d), 1.0), xi);
}

// Extremal coefficient of the measure on index set J:
//   theta(J) = ∫ max_{j in J} u_j H(du).
inline double theta_of_measure(const DiscreteSpectralMeasure& H, SubsetId J) {
  if (J == 0 || J > full_set(H.d))
    throw InvalidInput("subset mask outside measure dimension");
  double t = 0;
  for (const auto& a : H.atoms) {
    double m = 0;
    SubsetId s = J;
    for (int j = 0; s != 0; ++j, s >>= 1)
      if (s & 1u) m = std::max(m, a.u[static_cast<std::size_t>(j)]);
    t += a.h * m;
  }
  return t;
}

}  // namespace xvar
