#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "xvar/closed_form.hpp"
#include "xvar/sectors.hpp"
#include "xvar/spectral.hpp"

namespace {

// First 10 assets and last 10 assets of a 20-asset universe.
constexpr xvar::SubsetId kBlockLow = (xvar::SubsetId{1} << 10) - 1;
constexpr xvar::SubsetId kBlockHigh = ((xvar::SubsetId{1} << 20) - 1) ^ kBlockLow;

xvar::SectorPartition two_blocks_of_ten() {
  xvar::SectorPartition p;
  p.d = 20;
  p.blocks = {kBlockLow, kBlockHigh};
  p.beta = 0.5;
  p.sector_thetas = {8.0, 5.0};
  return p;
}

}  // namespace

TEST_CASE("sector partition validation", "[sectors]") {
  auto p = two_blocks_of_ten();
  REQUIRE_NOTHROW(p.validate());

  SECTION("single block") {
    p.blocks = {xvar::full_set(20)};
    p.sector_thetas = {8.0};
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
  }
  SECTION("overlapping blocks") {
    p.blocks[1] = kBlockHigh | 1u;
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
  }
  SECTION("blocks do not cover") {
    p.blocks[1] = kBlockHigh ^ (xvar::SubsetId{1} << 19);
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
  }
  SECTION("market share out of range") {
    p.beta = 1.0;
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
    p.beta = -0.1;
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
  }
  SECTION("sector coefficient out of range") {
    p.sector_thetas[0] = 0.5;
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
    p.sector_thetas[0] = 10.5;
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
  }
  SECTION("coefficient count mismatch") {
    p.sector_thetas.push_back(2.0);
    REQUIRE_THROWS_AS(p.validate(), xvar::InvalidInput);
  }
}

TEST_CASE("sector coefficient from portfolio coefficient", "[sectors]") {
  // theta_X(J_i) = beta + (1 - beta) theta_i inverts exactly.
  const double beta = 0.4;
  const double t = 2.5;
  const double observed = beta + (1 - beta) * t;
  REQUIRE(xvar::sector_theta_from_portfolio(observed, beta, 5) ==
          Catch::Approx(t).margin(1e-12));
  REQUIRE(xvar::sector_theta_from_portfolio(1.0, 0.0, 3) == 1.0);

  REQUIRE_THROWS_AS(xvar::sector_theta_from_portfolio(2.0, 1.0, 5),
                    xvar::InvalidInput);
  REQUIRE_THROWS_AS(xvar::sector_theta_from_portfolio(0.2, 0.4, 5),
                    xvar::InconsistentInput);
  // Implied coefficient above the block size.
  REQUIRE_THROWS_AS(
      xvar::sector_theta_from_portfolio(beta + (1 - beta) * 6.0, beta, 5),
      xvar::InconsistentInput);
}

TEST_CASE("market share recovery", "[sectors]") {
  SECTION("two blocks of ten") {
    // c_i = beta + (1-beta) t_i with beta = 0.5, t = (8, 5) gives
    // c = (4.5, 3.0) and c0 = beta + (1-beta)(t_1 + t_2) = 7.
    const auto p =
        xvar::solve_beta(7.0, {4.5, 3.0}, {kBlockLow, kBlockHigh}, 20);
    REQUIRE(p.beta == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(p.sector_thetas[0] == Catch::Approx(8.0).margin(1e-12));
    REQUIRE(p.sector_thetas[1] == Catch::Approx(5.0).margin(1e-12));
    REQUIRE(xvar::implied_full_coefficient(p) ==
            Catch::Approx(7.0).margin(1e-12));
  }

  SECTION("round trip through implied coefficients") {
    const auto p = two_blocks_of_ten();
    std::vector<double> ci;
    for (std::size_t i = 0; i < p.blocks.size(); ++i)
      ci.push_back(p.beta + (1 - p.beta) * p.sector_thetas[i]);
    const auto q =
        xvar::solve_beta(xvar::implied_full_coefficient(p), ci, p.blocks, p.d);
    REQUIRE(q.beta == Catch::Approx(p.beta).margin(1e-12));
    for (std::size_t i = 0; i < p.blocks.size(); ++i)
      REQUIRE(q.sector_thetas[i] ==
              Catch::Approx(p.sector_thetas[i]).margin(1e-12));
  }

  SECTION("rejects impossible combinations") {
    // sum ci < c0 forces beta < 0.
    REQUIRE_THROWS_AS(
        xvar::solve_beta(8.0, {4.5, 3.0}, {kBlockLow, kBlockHigh}, 20),
        xvar::InconsistentInput);
    // sum ci - c0 >= 1 forces beta >= 1.
    REQUIRE_THROWS_AS(
        xvar::solve_beta(2.0, {2.0, 2.0}, {kBlockLow, kBlockHigh}, 20),
        xvar::InconsistentInput);
    REQUIRE_THROWS_AS(xvar::solve_beta(7.0, {4.5}, {kBlockLow, kBlockHigh}, 20),
                      xvar::InvalidInput);
    REQUIRE_THROWS_AS(xvar::solve_beta(7.0, {7.0}, {xvar::full_set(20)}, 20),
                      xvar::InvalidInput);
  }
}

TEST_CASE("composite bounds", "[sectors]") {
  SECTION("pure market") {
    REQUIRE(xvar::pure_market_rho(16, 0.5) == Catch::Approx(256.0));
    REQUIRE(xvar::pure_market_rho(16, 1.0) == Catch::Approx(16.0));
    REQUIRE_THROWS_AS(xvar::pure_market_rho(16, 0.0), xvar::InvalidInput);
    REQUIRE_THROWS_AS(xvar::pure_market_rho(16, 1.2), xvar::InvalidInput);
  }

  SECTION("no market component reduces to per-sector bounds") {
    xvar::SectorPartition p;
    p.d = 5;
    p.blocks = {0b00011, 0b11100};
    p.beta = 0.0;
    p.sector_thetas = {1.5, 2.0};
    const double xi = 0.4;
    REQUIRE(xvar::composite_bound(p, xi, xvar::BoundSide::lower) ==
            Catch::Approx(xvar::lower_bound_rho(2, xi, 1.5) +
                          xvar::lower_bound_rho(3, xi, 2.0))
                .margin(1e-12));
    REQUIRE(xvar::composite_bound(p, xi, xvar::BoundSide::upper) ==
            Catch::Approx(xvar::upper_bound_rho(2, xi, 1.5) +
                          xvar::upper_bound_rho(3, xi, 2.0))
                .margin(1e-12));
  }

  SECTION("market and sectors combine affinely") {
    const auto p = two_blocks_of_ten();
    const double xi = 0.25;
    const double sectors = xvar::lower_bound_rho(10, xi, 8.0) +
                           xvar::lower_bound_rho(10, xi, 5.0);
    const double expected =
        0.5 * xvar::pure_market_rho(20, xi) + 0.5 * sectors;
    REQUIRE(xvar::composite_bound(p, xi, xvar::BoundSide::lower) ==
            Catch::Approx(expected).margin(1e-9));
    REQUIRE(xvar::composite_bound(p, xi, xvar::BoundSide::lower) <=
            xvar::composite_bound(p, xi, xvar::BoundSide::upper));
  }
}

TEST_CASE("composite measure attains the composite bound", "[sectors]") {
  const auto p = two_blocks_of_ten();
  const double xi = 0.25;

  for (const auto side : {xvar::BoundSide::lower, xvar::BoundSide::upper}) {
    const auto H = xvar::composite_measure(p, side);
    REQUIRE(H.d == 20);
    REQUIRE_NOTHROW(H.validate());

    for (int j = 0; j < H.d; ++j) {
      double margin = 0;
      for (const auto& atom : H.atoms)
        margin += atom.h * atom.u[static_cast<std::size_t>(j)];
      REQUIRE(margin == Catch::Approx(1.0).margin(1e-10));
    }

    REQUIRE(xvar::rho_of_measure(H, xi) ==
            Catch::Approx(xvar::composite_bound(p, xi, side)).margin(1e-9));

    // Block coefficients of the composite law match the observable c_i.
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
      const double ci = p.beta + (1 - p.beta) * p.sector_thetas[i];
      REQUIRE(xvar::theta_of_measure(H, p.blocks[i]) ==
              Catch::Approx(ci).margin(1e-10));
    }
    REQUIRE(xvar::theta_of_measure(H, xvar::full_set(20)) ==
            Catch::Approx(xvar::implied_full_coefficient(p)).margin(1e-10));
  }

  SECTION("no market atom when beta is zero") {
    xvar::SectorPartition q;
    q.d = 4;
    q.blocks = {0b0011, 0b1100};
    q.beta = 0.0;
    q.sector_thetas = {1.5, 2.0};
    const auto H = xvar::composite_measure(q, xvar::BoundSide::lower);
    const auto s1 = xvar::lower_bound_measure(2, 1.5);
    const auto s2 = xvar::lower_bound_measure(2, 2.0);
    REQUIRE(H.atoms.size() == s1.atoms.size() + s2.atoms.size());
    REQUIRE_NOTHROW(H.validate());
  }
}
