#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <xvar/closed_form.hpp>
#include <xvar/spectral.hpp>

using namespace xvar;

TEST_CASE("Frechet envelope in chi terms", "[closed_form]") {
  const int d = 10;
  const double xi = 0.1981;
  const std::vector<double> ones(d, 1.0);
  const RhoBounds rb = frechet_rho(ones, xi);
  // chi ranges over [d^xi, d] for the unit-weight portfolio.
  CHECK(chi_from_rho(rb.lower, xi) == Catch::Approx(std::pow(10.0, xi)).epsilon(1e-12));
  CHECK(chi_from_rho(rb.upper, xi) == Catch::Approx(10.0).epsilon(1e-12));
  // Published reference quotes the independence endpoint to five figures.
  CHECK(std::pow(10.0, 0.1981) == Catch::Approx(1.5782).margin(5e-4));

  SECTION("general weights") {
    const std::vector<double> w = {2.0, 1.0, 0.5};
    const RhoBounds g = frechet_rho(w, 0.5);
    double indep = 0;
    for (double wj : w) indep += wj * wj;  // 1/xi = 2
    CHECK(g.lower == Catch::Approx(indep).epsilon(1e-12));
    CHECK(g.upper == Catch::Approx(3.5 * 3.5).epsilon(1e-12));
  }

  SECTION("order swaps for xi above one") {
    const RhoBounds g = frechet_rho({1.0, 1.0}, 1.5);
    CHECK(g.lower <= g.upper);
    // Comonotone is now the smaller rho.
    CHECK(g.lower == Catch::Approx(std::pow(2.0, 1.0 / 1.5)).epsilon(1e-12));
    CHECK(g.upper == Catch::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("lower bound bin selection", "[closed_form]") {
  // theta = d/k sits on a knot; between knots lambda interpolates linearly.
  CHECK(lower_bound_bin(6, 3.0).k == 1);
  CHECK(lower_bound_bin(6, 3.0).lambda == Catch::Approx(0.0).margin(1e-12));
  CHECK(lower_bound_bin(6, 6.0).k == 1);
  CHECK(lower_bound_bin(6, 6.0).lambda == Catch::Approx(1.0).margin(1e-12));
  CHECK(lower_bound_bin(6, 1.0).k == 5);
  CHECK(lower_bound_bin(6, 1.0).lambda == Catch::Approx(0.0).margin(1e-12));

  const LowerBoundBin bin = lower_bound_bin(6, 2.4);  // between 6/3 and 6/2
  CHECK(bin.k == 2);
  CHECK(bin.lambda == Catch::Approx((2.4 / 6 - 1.0 / 3) / (0.5 - 1.0 / 3)).margin(1e-12));

  CHECK(lower_bound_bin(1, 1.0).k == 1);
  CHECK(lower_bound_bin(1, 1.0).lambda == Catch::Approx(1.0));
}

TEST_CASE("headline bound values at d=10", "[closed_form]") {
  const int d = 10;
  const double xi = 0.1981, theta = 3.15;
  const double chi_l = chi_from_rho(lower_bound_rho(d, xi, theta), xi);
  const double chi_u = chi_from_rho(upper_bound_rho(d, xi, theta), xi);
  CHECK(chi_l == Catch::Approx(4.118325).margin(1e-5));
  CHECK(chi_u == Catch::Approx(9.781443).margin(1e-5));
  const RhoBounds both = theta_bound_rho(d, xi, theta);
  CHECK(both.lower == Catch::Approx(lower_bound_rho(d, xi, theta)));
  CHECK(both.upper == Catch::Approx(upper_bound_rho(d, xi, theta)));
}

TEST_CASE("bounds meet at the endpoints and collapse at xi=1", "[closed_form]") {
  for (int d : {2, 5, 17}) {
    for (double xi : {0.2, 0.55, 1.0}) {
      const double rho_comon = std::pow(d, 1.0 / xi);
      CHECK(lower_bound_rho(d, xi, 1.0) == Catch::Approx(rho_comon).epsilon(1e-12));
      CHECK(upper_bound_rho(d, xi, 1.0) == Catch::Approx(rho_comon).epsilon(1e-12));
      CHECK(lower_bound_rho(d, xi, d) == Catch::Approx(d).epsilon(1e-12));
      CHECK(upper_bound_rho(d, xi, d) == Catch::Approx(d).epsilon(1e-12));
    }
    for (double theta = 1.0; theta <= d; theta += 0.25)
      CHECK(lower_bound_rho(d, 1.0, theta) == Catch::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("lower stays below upper across the grid", "[closed_form]") {
  for (int d : {2, 5, 10}) {
    for (double xi : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      for (int i = 0; i <= 100; ++i) {
        const double theta = 1.0 + (d - 1.0) * i / 100.0;
        const double L = lower_bound_rho(d, xi, theta);
        const double U = upper_bound_rho(d, xi, theta);
        REQUIRE(L <= U * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("upper bound is decreasing in theta", "[closed_form]") {
  const int d = 8;
  const double xi = 0.35;
  double prev = upper_bound_rho(d, xi, 1.0);
  for (int i = 1; i <= 60; ++i) {
    const double theta = 1.0 + (d - 1.0) * i / 60.0;
    const double cur = upper_bound_rho(d, xi, theta);
    REQUIRE(cur <= prev + 1e-12);
    prev = cur;
  }

  SECTION("derivative matches finite differences") {
    for (double theta : {1.5, 3.0, 5.5, 7.2}) {
      const double h = 1e-6;
      const double fd = (upper_bound_rho(d, xi, theta + h) -
                         upper_bound_rho(d, xi, theta - h)) /
                        (2 * h);
      CHECK(upper_bound_derivative(d, xi, theta) == Catch::Approx(fd).margin(1e-4));
      CHECK(upper_bound_derivative(d, xi, theta) <= 0.0);
    }
  }
}

TEST_CASE("attaining measures reproduce their bounds", "[closed_form]") {
  for (int d : {2, 4, 9}) {
    for (double xi : {0.25, 0.6, 0.95}) {
      for (double frac : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        const double theta = 1.0 + (d - 1.0) * frac;

        const DiscreteSpectralMeasure lo = lower_bound_measure(d, theta);
        lo.validate(1e-9);
        CHECK(theta_of_measure(lo, full_set(d)) == Catch::Approx(theta).margin(1e-10));
        CHECK(rho_of_measure(lo, xi) ==
              Catch::Approx(lower_bound_rho(d, xi, theta)).epsilon(1e-12));

        const DiscreteSpectralMeasure up = upper_bound_measure(d, theta);
        up.validate(1e-9);
        CHECK(theta_of_measure(up, full_set(d)) == Catch::Approx(theta).margin(1e-10));
        CHECK(rho_of_measure(up, xi) ==
              Catch::Approx(upper_bound_rho(d, xi, theta)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("input guards", "[closed_form]") {
  CHECK_THROWS_AS(chi_from_rho(2.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(chi_from_rho(-1.0, 0.5), InvalidInput);
  CHECK_THROWS_AS(lower_bound_rho(5, 0.0, 2.0), InvalidInput);
  CHECK_THROWS_AS(lower_bound_rho(5, 1.2, 2.0), InvalidInput);
  CHECK_THROWS_AS(upper_bound_rho(5, -0.1, 2.0), InvalidInput);
  // Theta barely outside [1, d] is clamped; anything further out is rejected.
  CHECK(lower_bound_rho(5, 0.5, 1.0 - 1e-12) ==
        Catch::Approx(lower_bound_rho(5, 0.5, 1.0)));
  CHECK(upper_bound_rho(5, 0.5, 5.0 + 1e-12) ==
        Catch::Approx(upper_bound_rho(5, 0.5, 5.0)));
  CHECK_THROWS_AS(lower_bound_rho(5, 0.5, 0.2), InvalidInput);
  CHECK_THROWS_AS(upper_bound_rho(5, 0.5, 9.0), InvalidInput);
  CHECK(var_bound(2.5, 4.0) == Catch::Approx(10.0));
}
