#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include <xvar/subsets.hpp>

using namespace xvar;

namespace {

SubsetFamily family_from(int d, std::vector<std::pair<std::vector<int>, double>> entries) {
  SubsetFamily f(d);
  for (auto& [elems, v] : entries) f.add(elems, v);
  f.finalize();
  return f;
}

// theta(J) = sum_K 1{K ∩ J ≠ ∅} beta_K evaluated directly.
SubsetFamily theta_from_beta_direct(int d, const std::vector<double>& beta) {
  SubsetFamily f(d);
  for (SubsetId J = 1; J <= full_set(d); ++J) {
    double v = 0;
    for (SubsetId K = 1; K <= full_set(d); ++K)
      if (K & J) v += beta[K - 1];
    f.add(J, v);
  }
  f.finalize();
  return f;
}

}  // namespace

TEST_CASE("subset masks and labels", "[subsets]") {
  CHECK(subset_from_elements({1, 3}, 3) == 0b101u);
  CHECK(subset_from_elements({3, 1}, 3) == 0b101u);
  CHECK(subset_size(0b1011u) == 3);
  CHECK(full_set(4) == 0b1111u);
  CHECK(subset_label(0b101u) == "[1,3]");
  CHECK(subset_label(0) == "[]");
  CHECK(subset_from_label("[2,4]", 4) == 0b1010u);

  CHECK_THROWS_AS(subset_from_elements({0}, 3), InvalidInput);
  CHECK_THROWS_AS(subset_from_elements({4}, 3), InvalidInput);
  CHECK_THROWS_AS(subset_from_elements({1, 1}, 3), InvalidInput);
  CHECK_THROWS_AS(check_dimension(21), InvalidInput);
  CHECK_THROWS_AS(check_dimension(0), InvalidInput);

  const std::vector<int> elems = subset_elements(0b1100u);
  CHECK(elems == std::vector<int>{3, 4});
}

TEST_CASE("subset enumeration is ordered by size then mask", "[subsets]") {
  const auto subsets = enumerate_subsets(4);
  REQUIRE(subsets.size() == 15);
  for (std::size_t i = 1; i < subsets.size(); ++i)
    CHECK(subset_order_less(subsets[i - 1], subsets[i]));
  CHECK(subsets.front() == 0b0001u);
  CHECK(subsets.back() == 0b1111u);
  // All three singletons come before the first pair.
  CHECK(subset_size(subsets[3]) == 1);
  CHECK(subset_size(subsets[4]) == 2);
}

TEST_CASE("family lookup and canonical order", "[subsets]") {
  auto f = family_from(3, {{{1, 2}, 1.5}, {{1}, 1.0}, {{2}, 1.0}, {{3}, 1.0}});
  CHECK(f.size() == 4);
  CHECK(f.sets.front() == 0b001u);       // sorted to canonical order
  CHECK(f.sets.back() == 0b011u);
  CHECK(f.value_of(subset_from_elements({1, 2}, 3)) == 1.5);
  CHECK(f.index_of(0b100u) == 2);
  CHECK_FALSE(f.has(0b111u));
  CHECK_THROWS_AS(f.value_of(0b111u), InvalidInput);

  SubsetFamily dup(2);
  dup.add(std::vector<int>{1}, 1.0);
  dup.add(std::vector<int>{1}, 1.0);
  CHECK_THROWS_AS(dup.finalize(), InvalidInput);

  SubsetFamily bad(2);
  CHECK_THROWS_AS(bad.add(SubsetId{0b100}, 1.0), InvalidInput);
}

TEST_CASE("constraint form validation", "[subsets]") {
  auto good = family_from(2, {{{1}, 1.0}, {{2}, 1.0}, {{1, 2}, 1.5}});
  CHECK_NOTHROW(good.require_constraint_form());

  auto missing = family_from(2, {{{1}, 1.0}, {{1, 2}, 1.5}});
  CHECK_THROWS_AS(missing.require_constraint_form(), InvalidInput);

  auto off_margin = family_from(2, {{{1}, 1.0}, {{2}, 1.1}, {{1, 2}, 1.5}});
  CHECK_THROWS_AS(off_margin.require_constraint_form(), InconsistentInput);

  auto too_big = family_from(2, {{{1}, 1.0}, {{2}, 1.0}, {{1, 2}, 2.5}});
  CHECK_THROWS_AS(too_big.require_constraint_form(), InconsistentInput);
}

TEST_CASE("Mobius inversion on known cases", "[subsets]") {
  SECTION("d=2 mixed dependence") {
    auto theta = family_from(2, {{{1}, 1.0}, {{2}, 1.0}, {{1, 2}, 1.5}});
    const auto mw = mobius_weights(theta);
    CHECK(mw.of(0b01u) == Catch::Approx(0.5).margin(1e-12));
    CHECK(mw.of(0b10u) == Catch::Approx(0.5).margin(1e-12));
    CHECK(mw.of(0b11u) == Catch::Approx(0.5).margin(1e-12));
    CHECK(mw.total_mass() == Catch::Approx(1.5).margin(1e-12));
  }

  SECTION("complete dependence puts all mass on the full set") {
    const int d = 4;
    SubsetFamily theta(d);
    for (SubsetId J = 1; J <= full_set(d); ++J) theta.add(J, 1.0);
    theta.finalize();
    const auto mw = mobius_weights(theta);
    for (SubsetId K = 1; K < full_set(d); ++K)
      CHECK(mw.of(K) == Catch::Approx(0.0).margin(1e-12));
    CHECK(mw.of(full_set(d)) == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("independence puts mass one on each singleton") {
    const int d = 4;
    SubsetFamily theta(d);
    for (SubsetId J = 1; J <= full_set(d); ++J) theta.add(J, subset_size(J));
    theta.finalize();
    const auto mw = mobius_weights(theta);
    for (SubsetId K = 1; K <= full_set(d); ++K) {
      const double expect = subset_size(K) == 1 ? 1.0 : 0.0;
      CHECK(mw.of(K) == Catch::Approx(expect).margin(1e-12));
    }
  }

  SECTION("incomplete family is rejected") {
    auto partial = family_from(2, {{{1}, 1.0}, {{2}, 1.0}});
    CHECK_THROWS_AS(mobius_weights(partial), InvalidInput);
  }
}

TEST_CASE("Mobius round trip on random nonnegative weights", "[subsets]") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> mass(0.0, 2.0);
  for (int d = 2; d <= 6; ++d) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> beta(full_set(d), 0.0);
      for (auto& b : beta) b = mass(gen);
      const auto theta = theta_from_beta_direct(d, beta);
      const auto mw = mobius_weights(theta);
      for (SubsetId K = 1; K <= full_set(d); ++K)
        REQUIRE(mw.of(K) == Catch::Approx(beta[K - 1]).margin(1e-10));
      // And back again through the reconstruction.
      const auto rebuilt = theta_from_mobius(mw);
      for (std::size_t i = 0; i < theta.size(); ++i)
        REQUIRE(rebuilt.values[i] == Catch::Approx(theta.values[i]).margin(1e-10));
    }
  }
}

TEST_CASE("Mobius transform path for d above 12 agrees", "[subsets]") {
  // d=13 exercises the subset-difference transform; cross-check against the
  // reconstruction identity rather than the O(3^d) path.
  const int d = 13;
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  MobiusWeights mw;
  mw.d = d;
  mw.beta.assign(full_set(d), 0.0);
  std::uniform_int_distribution<SubsetId> pick(1, full_set(d));
  for (int k = 0; k < 50; ++k) mw.beta[pick(gen) - 1] = mass(gen);
  const auto theta = theta_from_mobius(mw);
  const auto back = mobius_weights(theta);
  for (SubsetId K = 1; K <= full_set(d); ++K)
    REQUIRE(back.of(K) == Catch::Approx(mw.of(K)).margin(1e-9));
}

TEST_CASE("consistency check on the d=2 textbook cases", "[subsets]") {
  auto ok = family_from(2, {{{1}, 1.0}, {{2}, 1.0}, {{1, 2}, 1.5}});
  CHECK(check_consistency(ok).consistent);
  CHECK(check_consistency(ok).violations.empty());

  auto comon = family_from(2, {{{1}, 1.0}, {{2}, 1.0}, {{1, 2}, 1.0}});
  CHECK(check_consistency(comon).consistent);

  // theta({1,2}) = 2.5 breaks the inequality indexed by the empty set:
  // theta({1}) + theta({2}) - theta({1,2}) = -0.5.
  auto bad = family_from(2, {{{1}, 1.0}, {{2}, 1.0}, {{1, 2}, 2.5}});
  const auto rep = check_consistency(bad);
  REQUIRE_FALSE(rep.consistent);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].inequality_at == 0);
  CHECK(rep.violations[0].slack == Catch::Approx(-0.5).margin(1e-12));
}

TEST_CASE("consistency check equals nonnegativity of Mobius weights", "[subsets]") {
  std::mt19937 gen(4242);
  std::uniform_real_distribution<double> mass(-0.3, 1.0);
  for (int d = 2; d <= 5; ++d) {
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<double> beta(full_set(d), 0.0);
      bool any_negative = false;
      for (auto& b : beta) {
        b = mass(gen);
        if (b < -1e-9) any_negative = true;
      }
      const auto theta = theta_from_beta_direct(d, beta);
      const auto rep2 = check_consistency(theta);
      REQUIRE(rep2.consistent == !any_negative);
      REQUIRE(rep2.checked == beta.size());
    }
  }
}

TEST_CASE("consistency check instantiates what it can on partial families", "[subsets]") {
  auto f = family_from(3, {{{1}, 1.0}, {{2}, 1.0}, {{3}, 1.0},
                           {{1, 2}, 1.4}, {{1, 3}, 1.6}, {{2, 3}, 1.5},
                           {{1, 2, 3}, 1.8}});
  const auto rep = check_consistency(f);
  CHECK(rep.consistent);
  CHECK(rep.checked == 7);  // complete at d=3: one inequality per subset

  // Drop the triple: no inequality has all its supersets any more except
  // none, so nothing can be checked and the family is vacuously consistent.
  auto pairs_only = family_from(3, {{{1}, 1.0}, {{2}, 1.0}, {{3}, 1.0},
                                    {{1, 2}, 1.4}, {{1, 3}, 1.6}, {{2, 3}, 1.5}});
  const auto rep2 = check_consistency(pairs_only);
  CHECK(rep2.consistent);
  CHECK(rep2.checked == 0);

  // A pair inequality t(12) >= t(1) + t(2) - t(123)... the instantiable one
  // at J={1,2} reads theta(123) - theta(12) >= 0 and fails when reversed.
  auto shrink = family_from(3, {{{1, 2}, 1.9}, {{1, 2, 3}, 1.4}});
  const auto rep3 = check_consistency(shrink);
  REQUIRE_FALSE(rep3.consistent);
  CHECK(rep3.violations[0].inequality_at == subset_from_elements({1, 2}, 3));
  CHECK(rep3.violations[0].slack == Catch::Approx(-0.5).margin(1e-12));
}

TEST_CASE("raw tail counts are consistent without unit margins", "[subsets]") {
  // Counting estimates theta(J) = (1/N) sum_i 1{max_{j in J} x_ij > 1} keep
  // every alternating-sum inequality nonnegative even when the singleton
  // values differ from 1. Build such a family directly from a 0/1 panel.
  std::mt19937 gen(7);
  std::bernoulli_distribution hit(0.3);
  const int d = 4, n = 200;
  std::vector<std::vector<int>> panel(n, std::vector<int>(d));
  for (auto& row : panel)
    for (auto& cell : row) cell = hit(gen) ? 1 : 0;

  SubsetFamily counts(d);
  for (SubsetId J = 1; J <= full_set(d); ++J) {
    int c = 0;
    for (const auto& row : panel)
      for (int j = 0; j < d; ++j)
        if ((J >> j & 1) && row[static_cast<std::size_t>(j)]) {
          ++c;
          break;
        }
    counts.add(J, static_cast<double>(c) / 37.0);  // arbitrary common scale
  }
  counts.finalize();
  CHECK(counts.value_of(0b0001u) != 1.0);  // margins are not standardized
  CHECK(check_consistency(counts, 1e-12).consistent);
}

TEST_CASE("alternation identity for max functionals", "[subsets]") {
  // For any nonnegative x the set function J -> max_{j in J} x_j satisfies
  // all alternating-sum inequalities with theta(∅) := 0.
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> mag(0.0, 5.0);
  for (int d = 2; d <= 6; ++d) {
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = mag(gen);
      SubsetFamily f(d);
      for (SubsetId J = 1; J <= full_set(d); ++J) {
        double m = 0;
        for (int j = 0; j < d; ++j)
          if (J >> j & 1) m = std::max(m, x[static_cast<std::size_t>(j)]);
        f.add(J, m);
      }
      f.finalize();
      REQUIRE(check_consistency(f, 1e-12).consistent);
    }
  }
}

TEST_CASE("monotonicity check reports offending pairs", "[subsets]") {
  auto ok = family_from(2, {{{1}, 1.0}, {{1, 2}, 1.5}});
  CHECK(monotonicity_check(ok).empty());

  auto bad = family_from(2, {{{1}, 1.0}, {{1, 2}, 0.9}});
  const auto v = monotonicity_check(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].subset == 0b01u);
  CHECK(v[0].superset == 0b11u);
  CHECK(v[0].gap == Catch::Approx(-0.1).margin(1e-12));

  // Complete independent family is monotone.
  const int d = 4;
  SubsetFamily indep(d);
  for (SubsetId J = 1; J <= full_set(d); ++J) indep.add(J, subset_size(J));
  indep.finalize();
  CHECK(monotonicity_check(indep).empty());

  // Complete family with one dip reports every nested pair through it:
  // both singletons exceed the dipped value of {1,2}.
  SubsetFamily dip(3);
  for (SubsetId J = 1; J <= full_set(3); ++J)
    dip.add(J, J == 0b011u ? 0.5 : subset_size(J));
  dip.finalize();
  CHECK(monotonicity_check(dip).size() == 2);
}
