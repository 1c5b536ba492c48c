#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <xvar/closed_form.hpp>
#include <xvar/errors.hpp>
#include <xvar/spectral.hpp>
#include <xvar/subsets.hpp>

namespace xvar {

// Market-plus-sectors model: a comonotone market component of weight beta
// plus sector-local dependence on disjoint blocks J_1..J_k. Extremal
// coefficients decompose as
//   theta_X(J) = beta + (1 - beta) * sum_i theta_i(J ∩ J_i),
// so sector-level coefficients and beta are recoverable from the observable
// block and full-set coefficients, and bounds compose additively.

enum class BoundSide { lower, upper };

struct SectorPartition {
  int d = 0;
  std::vector<SubsetId> blocks;
  double beta = 0;
  std::vector<double> sector_thetas;

  int block_size(std::size_t i) const { return subset_size(blocks[i]); }

  void validate() const {
    check_dimension(d);
    if (blocks.size() < 2) throw InvalidInput("need at least 2 sectors");
    if (sector_thetas.size() != blocks.size())
      throw InvalidInput("one sector coefficient per block required");
    SubsetId seen = 0;
    for (SubsetId b : blocks) {
      if (b == 0 || b >= (SubsetId{1} << d))
        throw InvalidInput("sector block out of range");
      if (seen & b) throw InvalidInput("sector blocks overlap");
      seen |= b;
    }
    if (seen != full_set(d))
      throw InvalidInput("sector blocks must cover every asset");
    if (!(beta >= 0) || beta >= 1)
      throw InvalidInput("market share beta must lie in [0, 1)");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double t = sector_thetas[i];
      const int di = block_size(i);
      if (!(t >= 1.0 - 1e-9) || t > di + 1e-9)
        throw InvalidInput("sector " + std::to_string(i + 1) +
                           " coefficient outside [1, " + std::to_string(di) + "]");
    }
  }
};

// Inverts theta_X(J_i) = beta + (1-beta) * theta_i(J_i) for one sector.
inline double sector_theta_from_portfolio(double theta_J, double beta,
                                          int block_dim) {
  if (!(beta >= 0) || beta >= 1)
    throw InvalidInput("market share beta must lie in [0, 1)");
  if (theta_J < beta - 1e-12)
    throw InconsistentInput("block coefficient below the market share");
  const double t = (theta_J - beta) / (1.0 - beta);
  if (t < 1.0 - 1e-9 || t > block_dim + 1e-9)
    throw InconsistentInput("implied sector coefficient outside [1, block size]");
  return std::clamp(t, 1.0, static_cast<double>(block_dim));
}

// Recovers the market share from the full-set coefficient c0 and the block
// coefficients ci by elimination:
//   beta = (sum_i c_i - c0) / (k - 1),   theta_i = (c_i - beta)/(1 - beta).
inline SectorPartition solve_beta(double c0, const std::vector<double>& ci,
                                  const std::vector<SubsetId>& blocks, int d) {
  if (blocks.size() < 2) throw InvalidInput("need at least 2 sectors");
  if (ci.size() != blocks.size())
    throw InvalidInput("one block coefficient per block required");
  const auto k = static_cast<double>(ci.size());
  double sum = 0;
  for (double c : ci) sum += c;
  const double beta = (sum - c0) / (k - 1.0);
  if (beta < -1e-9 || beta >= 1.0 - 1e-12)
    throw InconsistentInput("implied market share " + std::to_string(beta) +
                            " outside [0, 1)");
  SectorPartition p;
  p.d = d;
  p.blocks = blocks;
  p.beta = std::max(beta, 0.0);
  for (std::size_t i = 0; i < ci.size(); ++i)
    p.sector_thetas.push_back(
        sector_theta_from_portfolio(ci[i], p.beta, subset_size(blocks[i])));
  p.validate();
  return p;
}

// The beta -> 1 boundary of the model: a pure market, rho = d^(1/xi).
inline double pure_market_rho(int d, double xi) {
  detail::check_xi_unit(xi);
  return std::pow(static_cast<double>(d), 1.0 / xi);
}

// Composite bound for the balanced portfolio:
//   rho = beta d^(1/xi) + (1-beta) sum_i B(d_i, xi, theta_i),
// with B the one-constraint lower or upper bound within each sector.
inline double composite_bound(const SectorPartition& p, double xi,
                              BoundSide side) {
  p.validate();
  detail::check_xi_unit(xi);
  double sectors = 0;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const int di = p.block_size(i);
    sectors += side == BoundSide::lower
                   ? lower_bound_rho(di, xi, p.sector_thetas[i])
                   : upper_bound_rho(di, xi, p.sector_thetas[i]);
  }
  return p.beta * pure_market_rho(p.d, xi) + (1.0 - p.beta) * sectors;
}

// Spectral measure attaining the composite bound: the market atom
// (1/d, ..., 1/d) with mass beta*d, plus each sector's attaining measure
// embedded with zeros outside its block and mass scaled by 1 - beta.
inline DiscreteSpectralMeasure composite_measure(const SectorPartition& p,
                                                 BoundSide side) {
  p.validate();
  DiscreteSpectralMeasure H;
  H.d = p.d;
  if (p.beta > 0) {
    SpectralAtom market;
    market.u.assign(static_cast<std::size_t>(p.d), 1.0 / p.d);
    market.h = p.beta * p.d;
    H.atoms.push_back(std::move(market));
  }
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const int di = p.block_size(i);
    const auto coords = subset_elements(p.blocks[i]);
    const DiscreteSpectralMeasure sector =
        side == BoundSide::lower ? lower_bound_measure(di, p.sector_thetas[i])
                                 : upper_bound_measure(di, p.sector_thetas[i]);
    for (const auto& atom : sector.atoms) {
      SpectralAtom padded;
      padded.u.assign(static_cast<std::size_t>(p.d), 0.0);
      for (int jj = 0; jj < di; ++jj)
        padded.u[static_cast<std::size_t>(coords[static_cast<std::size_t>(jj)] - 1)] =
            atom.u[static_cast<std::size_t>(jj)];
      padded.h = (1.0 - p.beta) * atom.h;
      H.atoms.push_back(std::move(padded));
    }
  }
  return H;
}

// Overall coefficient implied by the partition, theta_X(D).
inline double implied_full_coefficient(const SectorPartition& p) {
  double s = 0;
  for (double t : p.sector_thetas) s += t;
  return p.beta + (1.0 - p.beta) * s;
}

}  // namespace xvar
