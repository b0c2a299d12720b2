#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "embedsplit/error.hpp"
#include "embedsplit/estgen.hpp"
#include "embedsplit/schemes.hpp"

using namespace embedsplit;

namespace {

Word w(std::initializer_list<Symbol> s) { return Word(std::vector<Symbol>(s)); }

std::vector<double> suzuki_alphas() {
  const double a1 = 1.0 / (4.0 - std::cbrt(4.0));
  const double a3 = 1.0 / (1.0 - std::cbrt(16.0));
  return {a1, a1, a3, a1, a1};
}

int row_of(const WeightSystem& s, const Word& word) {
  auto it = std::find(s.rows.begin(), s.rows.end(), word);
  REQUIRE(it != s.rows.end());
  return static_cast<int>(it - s.rows.begin());
}

}  // namespace

TEST_CASE("count_conditions matches the table") {
  const long ss[] = {1, 2, 4, 7, 12, 20};
  const long ma[] = {1, 3, 7, 15, 31, 63};
  const long sp[] = {2, 6, 14, 30, 62, 126};
  for (int l = 1; l <= 6; ++l) {
    CHECK(count_conditions(Family::SS, l) == ss[l - 1]);
    CHECK(count_conditions(Family::MethodAdjoint, l) == ma[l - 1]);
    CHECK(count_conditions(Family::Splitting, l) == sp[l - 1]);
  }
  // beyond the table: recurrence vs enumeration
  auto gens = GeneratorSet::make(Family::SS, 9);
  CHECK(count_conditions(Family::SS, 9) == static_cast<long>(enumerate_words(gens, 9).size()) - 1);
  CHECK_THROWS_AS(count_conditions(Family::SS, 0), Error);
}

TEST_CASE("assembled row counts equal count_conditions + 1") {
  for (const auto& m : catalog())
    for (int l = 1; l <= 6; ++l) {
      auto sys = assemble_system(m.scheme, l);
      CHECK(static_cast<long>(sys.rows.size()) - 1 == count_conditions(m.scheme.family, l));
      CHECK(sys.rows[0].empty());
      CHECK(sys.rhs[0] == 1.0);
      CHECK(sys.matrix.cols() == static_cast<long>(m.scheme.output_count()));
    }
}

TEST_CASE("prefix_products") {
  auto ss = ss_scheme(suzuki_alphas(), 4);
  auto p = prefix_products(ss, 4);
  CHECK(p.size() == 5);
  for (const auto& q : {ss}) {
    auto pp = prefix_products(q, 3);
    CHECK(pp[0].terms().size() == 1);
    CHECK(pp[0].constant_term() == 1.0);
  }
  CHECK(prefix_products(find_method("PRK6-4(3)").scheme, 3).size() == 13);
  CHECK(prefix_products(find_method("MA6-4(3)").scheme, 3).size() == 12);
}

TEST_CASE("SS rows at order 4 reproduce the hand-derived equations") {
  // arbitrary (non-symmetric) coefficients; equations up to a row factor
  const std::vector<double> al = {0.4, -0.3, 0.7, 0.5, -0.3};
  auto sys = assemble_system(ss_scheme(al, 2), 4);
  const int rF = row_of(sys, w({sym::F}));
  const int rFF = row_of(sys, w({sym::F, sym::F}));
  const int rFFF = row_of(sys, w({sym::F, sym::F, sym::F}));
  const int rY3 = row_of(sys, w({sym::Y(3)}));
  const int rFFFF = row_of(sys, w({sym::F, sym::F, sym::F, sym::F}));
  const int rFY3 = row_of(sys, w({sym::F, sym::Y(3)}));
  const int rY3F = row_of(sys, w({sym::Y(3), sym::F}));
  CHECK(sys.rows.size() == 8);

  for (int k = 0; k < 5; ++k) {
    double g = 0, c3 = 0, c4 = 0, f42 = 0, f43 = 0;
    for (int j = 0; j < k; ++j) {
      g += al[j];
      c3 += std::pow(al[j], 3);
      c4 += std::pow(al[j], 4);
    }
    f42 = f43 = c4;
    for (int j = 0; j < k; ++j)
      for (int l = j + 1; l < k; ++l) {
        f42 += 2 * std::pow(al[j], 3) * al[l];
        f43 += 2 * std::pow(al[l], 3) * al[j];
      }
    CAPTURE(k);
    CHECK(sys.matrix(0, k) == 1.0);
    CHECK(sys.matrix(rF, k) == doctest::Approx(g).epsilon(1e-14));
    CHECK(2 * sys.matrix(rFF, k) == doctest::Approx(g * g).epsilon(1e-14));
    CHECK(6 * sys.matrix(rFFF, k) == doctest::Approx(g * g * g).epsilon(1e-13));
    CHECK(sys.matrix(rY3, k) == doctest::Approx(c3).epsilon(1e-14));
    CHECK(24 * sys.matrix(rFFFF, k) == doctest::Approx(std::pow(g, 4)).epsilon(1e-13));
    std::multiset<double> got{std::round(2e12 * sys.matrix(rFY3, k)),
                              std::round(2e12 * sys.matrix(rY3F, k))};
    std::multiset<double> want{std::round(1e12 * f42), std::round(1e12 * f43)};
    CHECK(got == want);
  }
  CHECK(sys.rhs[rF] == 1.0);
  CHECK(sys.rhs[rFF] == 0.5);
  CHECK(sys.rhs[rY3] == 0.0);
  CHECK(sys.rhs[rFY3] == 0.0);
}

TEST_CASE("splitting system at order 1") {
  SplittingCoefficients c;
  c.a = {1.0};
  c.b = {0.5, 0.5};
  auto sys = assemble_system(splitting_scheme(c, 2), 1);
  REQUIRE(sys.rows.size() == 3);
  CHECK(sys.rows[1] == w({sym::A}));
  CHECK(sys.rows[2] == w({sym::B}));
  CHECK(sys.rhs[0] == 1.0);
  CHECK(sys.rhs[1] == 1.0);
  CHECK(sys.rhs[2] == 1.0);
}

TEST_CASE("Suzuki estimator equals the closed form") {
  auto al = suzuki_alphas();
  auto sys = assemble_system(ss_scheme(al, 4), 3);
  auto pairs = mirror_pairs(5, +1);
  auto e = solve_weights(sys, pairs);
  REQUIRE(e.feasible);
  CHECK(e.nullspace_dim == 0);
  const double g1 = al[0], g2 = al[0] + al[1];
  const double w1 = g2 * (1 - g2) / (g1 * (g1 - 1) - g2 * (g2 - 1));
  CHECK(std::abs(w1 + 1.4048) <= 1e-4);
  CHECK(e.w[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(e.w[1] - w1) <= 1e-12);
  CHECK(std::abs(e.w[4] - w1) <= 1e-12);
  CHECK(std::abs(e.w[2] - (1 - w1)) <= 1e-12);
  CHECK(std::abs(e.w[3] - (1 - w1)) <= 1e-12);
}

TEST_CASE("McLachlan estimator lies on the one-parameter family") {
  const auto& m = find_method("SS7-4(3)");
  auto al = m.scheme.coefficients();
  const double g1 = al[0], g2 = g1 + al[1], g3 = g2 + al[2];
  const double den = g1 * (g1 - 1) - g2 * (g2 - 1);
  auto sys = assemble_system(m.scheme, 3);
  auto pairs = mirror_pairs(7, +1);
  for (double w3 : {-0.5, 0.0, 0.8}) {
    const Pin pins[] = {{3, w3}};
    auto e = solve_weights(sys, pairs, pins);
    REQUIRE(e.feasible);
    CHECK(e.nullspace_dim == 0);
    const double w1 = (g2 * (1 - g2) + w3 * (g2 * (g2 - 1) - g3 * (g3 - 1))) / den;
    // w1 + w2 + w3 = 1 gives w2; the printed w2 expression has the g3 term with the wrong sign
    const double w2 = (g1 * (g1 - 1) - w3 * (g1 * (g1 - 1) - g3 * (g3 - 1))) / den;
    CHECK(e.w[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(e.w[1] - w1) <= 1e-11);
    CHECK(std::abs(e.w[2] - w2) <= 1e-11);
  }
  // unpinned: one free direction
  auto free = solve_weights(sys, pairs);
  CHECK(free.feasible);
  CHECK(free.nullspace_dim == 1);
}

TEST_CASE("doubled triple jump estimator") {
  const double a1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double a2 = 1.0 - 2.0 * a1;
  auto base = ss_scheme(std::vector<double>{a1, a2, a1}, 4);
  auto rep = replicate_halved(base, 2);
  CHECK(rep.stages.size() == 6);
  auto sys = assemble_system(rep, 3);
  auto pairs = mirror_pairs(6, +1);
  const Pin pins[] = {{3, 0.0}};
  auto e = solve_weights(sys, pairs, pins);
  REQUIRE(e.feasible);
  const double w1 = (1 - a1 * a1) / a2;
  CHECK(e.w[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(e.w[1] - w1) <= 1e-11);
  CHECK(std::abs(e.w[2] - (1 - w1)) <= 1e-11);
  CHECK(std::abs(e.w[5] - w1) <= 1e-11);
  CHECK(verify_order(rep, &e, 5).estimator->order == 3);
}

TEST_CASE("Yoshida s=7 estimator") {
  const auto& m = find_method("SS7-6(4)");
  auto sys = assemble_system(m.scheme, 4);
  auto e = solve_weights(sys, mirror_pairs(7, -1));
  REQUIRE(e.feasible);
  CHECK(e.w[1] == doctest::Approx(-0.90983233007647709242).epsilon(1e-10));
  CHECK(e.w[2] == doctest::Approx(2.16331188722978237305).epsilon(1e-10));
  CHECK(e.w[3] == doctest::Approx(0.55695580387159066608).epsilon(1e-10));
  CHECK(e.w[6] == doctest::Approx(0.90983233007647709242).epsilon(1e-10));
}

TEST_CASE("Sofroniou-Spaletta s=11 estimator") {
  const auto& m = find_method("SS11-6(5)");
  auto e = solve_weights(assemble_system(m.scheme, 5), mirror_pairs(11, +1));
  REQUIRE(e.feasible);
  CHECK(e.nullspace_dim == 0);
  const double tab[] = {-4.70925883588386976399, 24.61043285614692442695,
                          -19.39218824966918044634, 6.17441462307605721006,
                          -5.68340039366993142668};
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(e.w[i + 1] - tab[i]) <= 1e-9 * std::abs(tab[i]));
    CHECK(std::abs(e.w[10 - i] - tab[i]) <= 1e-9 * std::abs(tab[i]));
  }
}

TEST_CASE("Kahan-Li third-order pair") {
  const auto& m = find_method("SS17-8(5)(3)");
  auto al = m.scheme.coefficients();
  double g1 = al[0], g7 = 0;
  for (int j = 0; j < 7; ++j) g7 += al[j];
  // w1 + w7 = 1, g1(g1-1) w1 + g7(g7-1) w7 = 0
  const double c1 = g1 * (g1 - 1), c7 = g7 * (g7 - 1);
  const double w1 = c7 / (c7 - c1);
  CHECK(w1 == doctest::Approx(1.828514038642564624).epsilon(1e-12));

  auto sys = assemble_system(m.scheme, 3);
  const Pin pins[] = {{2, 0.0}, {3, 0.0}, {4, 0.0}, {5, 0.0}, {6, 0.0}, {8, 0.0}};
  auto e = solve_weights(sys, mirror_pairs(17, +1), pins);
  REQUIRE(e.feasible);
  CHECK(std::abs(e.w[1] - w1) <= 1e-11);
  CHECK(std::abs(e.w[7] - (1 - w1)) <= 1e-11);
  CHECK(std::abs(e.w[16] - w1) <= 1e-11);

  auto r = verify_order(m.scheme, &m.estimators[1], 5);
  CHECK(r.estimator->order == 3);
  CHECK(verify_order(m.scheme, nullptr, 9).method.order == 8);
}

TEST_CASE("admitting the final output gives only the trivial estimator") {
  auto scheme = ss_scheme(suzuki_alphas(), 4);
  auto sys = assemble_system(scheme, 4);
  auto full = full_product(scheme, 4);
  const long K = sys.matrix.cols();
  sys.matrix.conservativeResize(Eigen::NoChange, K + 1);
  for (std::size_t r = 0; r < sys.rows.size(); ++r) sys.matrix(r, K) = full.coeff(sys.rows[r]);
  auto e = solve_weights(sys);
  REQUIRE(e.feasible);
  CHECK(e.nullspace_dim == 0);
  for (long k = 0; k < K; ++k) CHECK(std::abs(e.w[k]) <= 1e-10);
  CHECK(e.w[K] == doctest::Approx(1.0).epsilon(1e-10));

  // without it, order 4 is out of reach
  CHECK_FALSE(solve_weights(assemble_system(scheme, 4)).feasible);
}

TEST_CASE("order 0 system is the trivial row") {
  auto sys = assemble_system(ss_scheme(suzuki_alphas(), 4), 0);
  CHECK(sys.rows.size() == 1);
  CHECK(sys.matrix.rows() == 1);
  CHECK((sys.matrix.array() == 1.0).all());
}

TEST_CASE("solve_weights is invariant under row scaling") {
  for (const char* name : {"SS5-4(3)", "SS11-6(5)", "PRK6-4(3)"}) {
    const auto& m = find_method(name);
    const auto& r = m.recipes.front();
    auto sys = assemble_system(m.scheme, r.order);
    auto a = solve_weights(sys, r.symmetry, r.pins);
    sys.matrix *= 2.0;
    sys.rhs *= 2.0;
    auto b = solve_weights(sys, r.symmetry, r.pins);
    for (std::size_t k = 0; k < a.w.size(); ++k) CHECK(std::abs(a.w[k] - b.w[k]) <= 1e-13 * (1 + std::abs(a.w[k])));
  }
}

TEST_CASE("feasibility is monotone in the order") {
  for (const auto& m : catalog()) {
    bool prev = true;
    for (int l = 1; l <= 6; ++l) {
      bool f = solve_weights(assemble_system(m.scheme, l)).feasible;
      CAPTURE(m.name);
      CAPTURE(l);
      if (!prev) CHECK_FALSE(f);
      prev = f;
    }
  }
}

TEST_CASE("constraint errors") {
  auto sys = assemble_system(ss_scheme(suzuki_alphas(), 4), 3);
  const Pin clash[] = {{1, 0.5}, {1, 0.25}};
  CHECK_THROWS_AS(solve_weights(sys, {}, clash), Error);
  const Pin out[] = {{9, 0.0}};
  CHECK_THROWS_AS(solve_weights(sys, {}, out), Error);
  const SignedPair loop[] = {{1, 4, 1}, {4, 1, -1}};
  const Pin one[] = {{1, 1.0}};
  CHECK_THROWS_AS(solve_weights(sys, loop, one), Error);
  const SignedPair bad_sign[] = {{1, 4, 2}};
  CHECK_THROWS_AS(solve_weights(sys, bad_sign), Error);
}

TEST_CASE("infeasible systems are reported, not thrown") {
  // a 3-stage SS scheme has too few outputs for order 3
  auto sys = assemble_system(ss_scheme(std::vector<double>{0.3, 0.4, 0.3}, 2), 3);
  auto e = solve_weights(sys);
  CHECK_FALSE(e.feasible);
  CHECK(e.residual > 1e-6);
}

TEST_CASE("verify_order") {
  auto suz = ss_scheme(suzuki_alphas(), 4);
  auto r = verify_order(suz, nullptr, 6);
  CHECK(r.method.order == 4);
  CHECK(r.method.residuals[5] > 1e-6);
  CHECK_FALSE(r.estimator);

  const auto& kl = find_method("SS17-8(5)(3)");
  CHECK(verify_order(kl.scheme, nullptr, 9).method.order == 8);
  CHECK(verify_order(kl.scheme, &kl.estimators[0], 7).estimator->order == 5);

  // exact flow: order saturates
  auto strang = ss_scheme(std::vector<double>{1.0}, 2);
  auto s = verify_order(strang, nullptr, 4);
  CHECK(s.method.order == 2);
  CHECK_FALSE(s.method.saturated());

  const EstimatorWeights wrong{{1.0, 0.0}, 1, 0, 0, true};
  CHECK_THROWS_AS(verify_order(suz, &wrong, 4), Error);
}
