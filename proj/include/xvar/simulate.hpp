#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include <xvar/errors.hpp>
#include <xvar/rng.hpp>
#include <xvar/spectral.hpp>

namespace xvar {

// Max-stable vector with unit Frechet margins driven by a discrete
// spectral measure: one Exp(1) variable per atom per draw gives
//   Y_j = max_k h_k u_{jk} / E_k,
//   P(Y <= y) = exp(-sum_k h_k max_j u_{jk}/y_j).
// Draw i consumes exponentials at indices i*K .. i*K+K-1 of stream 0, so
// rows are independent of evaluation order.
inline Eigen::MatrixXd sample_max_stable(const DiscreteSpectralMeasure& H,
                                         std::int64_t n, std::uint64_t seed) {
  H.validate();
  if (n <= 0) throw InvalidInput("sample count must be positive");
  const auto K = H.atoms.size();
  if (K == 0) throw InvalidInput("spectral measure has no atoms");

  CounterRng rng(seed);
  Eigen::MatrixXd Y(n, H.d);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < H.d; ++j) Y(i, j) = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double e = rng.exponential(0, static_cast<std::uint64_t>(i) * K + k);
      const double scale = H.atoms[k].h / e;
      for (int j = 0; j < H.d; ++j)
        Y(i, j) = std::max(Y(i, j), scale * H.atoms[k].u[static_cast<std::size_t>(j)]);
    }
  }
  return Y;
}

// Regularly varying losses with tail index 1/xi sharing the extremal
// dependence of H. Polar construction: radial Pareto(1) draw R, spectral
// atom k with probability h_k / mass, then
//   X_j = (R * mass * u_{jk})^xi.
// Each margin has an exactly Pareto tail P(X_j > x) = x^(-1/xi) beyond
// (mass * max_k u_{jk})^xi, so tail probabilities and extremal
// coefficients can be checked against closed forms. R is capped at 1e15
// to keep X finite for small xi. Stream 0 feeds the radius, stream 1 the
// atom choice.
inline Eigen::MatrixXd sample_rv_portfolio(const DiscreteSpectralMeasure& H,
                                           double xi, std::int64_t n,
                                           std::uint64_t seed) {
  H.validate();
  if (!(xi > 0)) throw InvalidInput("xi must be positive");
  if (n <= 0) throw InvalidInput("sample count must be positive");
  const auto K = H.atoms.size();
  if (K == 0) throw InvalidInput("spectral measure has no atoms");
  const double mass = H.total_mass();

  CounterRng rng(seed);
  Eigen::MatrixXd X(n, H.d);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const double r =
        std::min(1.0 / (1.0 - rng.uniform(0, idx)), 1e15);
    double target = rng.uniform(1, idx) * mass;
    std::size_t k = 0;
    for (; k + 1 < K; ++k) {
      target -= H.atoms[k].h;
      if (target <= 0) break;
    }
    for (int j = 0; j < H.d; ++j) {
      const double z = r * mass * H.atoms[k].u[static_cast<std::size_t>(j)];
      X(i, j) = z > 0 ? std::pow(z, xi) : 0.0;
    }
  }
  return X;
}

}  // namespace xvar
