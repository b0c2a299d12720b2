#include <cmath>
#include <numeric>

#include "doctest.h"
#include "embedsplit/error.hpp"
#include "embedsplit/problems.hpp"
#include "embedsplit/schemes.hpp"
#include "embedsplit/stepper.hpp"

using namespace embedsplit;

namespace {

const double kMetAdj[] = {0.08298440641740484666, 0.16231455076686615333,
                          0.23399525073150184666, 0.37087741497957699562,
                          -0.40993371990192559562, 0.05976209700657575333};

std::vector<double> ma_alphas() {
  return mirrored(std::span<const double>(kMetAdj));
}

}  // namespace

TEST_CASE("catalog contents") {
  auto names = method_names();
  const char* expected[] = {"SS5-4(3)",     "SS7-4(3)", "SS7-6(4)",  "SS11-6(5)",
                            "SS17-8(5)(3)", "MA6-4(3)", "PRK6-4(3)", "RKN6-4(3)"};
  REQUIRE(names.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(names[i] == expected[i]);
  CHECK_THROWS_AS(find_method("DOP853"), Error);

  for (const auto& m : catalog()) {
    CAPTURE(m.name);
    CHECK_NOTHROW(m.scheme.validate());
    CHECK(m.scheme.declared_order == m.main_order);
    for (const auto& e : m.estimators) CHECK(e.w.size() == m.scheme.output_count());
    if (m.dual()) CHECK(m.estimators[0].order != m.estimators[1].order);
    CHECK(m.estimator_order() < m.main_order);
  }
  CHECK(find_method("SS17-8(5)(3)").dual());
  CHECK(find_method("SS17-8(5)(3)").estimator_order() == 3);
}

TEST_CASE("catalog passes verify_order at the declared orders") {
  for (const auto& m : catalog()) {
    CAPTURE(m.name);
    const int probe = std::min(kMaxGrade, m.main_order + 1);
    auto r = verify_order(m.scheme, nullptr, probe, 1e-9);
    CHECK(r.method.order == m.main_order);
    for (const auto& e : m.estimators) {
      auto re = verify_order(m.scheme, &e, e.order + 1, 1e-9);
      CHECK(re.estimator->order == e.order);
    }
  }
}

TEST_CASE("PRK and RKN tabulated values") {
  const auto& prk = find_method("PRK6-4(3)");
  REQUIRE(prk.scheme.stages.size() == 13);
  CHECK(prk.scheme.stages[0].role == Role::FlowB);
  CHECK(prk.scheme.stages[0].coeff == 0.07920369643119565);
  CHECK(prk.scheme.stages[1].role == Role::FlowA);
  CHECK(prk.scheme.stages[1].coeff == 0.209515106613361);
  const auto& w = prk.estimators[0].w;
  CHECK(w[2] == 0.43458657385433203071);
  CHECK(w[3] == -w[2]);

  const auto& rkn = find_method("RKN6-4(3)");
  CHECK(rkn.estimators[0].w[2] == 0.43541552923952936004);
  CHECK(rkn.estimators[0].w[4] == -0.17978889668391821731);
}

TEST_CASE("stored coefficient lists are palindromic") {
  for (const auto& m : catalog()) {
    if (!m.symmetric) continue;
    auto c = m.scheme.coefficients();
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n / 2; ++i) CHECK(c[i] == c[n - 1 - i]);
  }
}

TEST_CASE("splitting_from_methodadjoint") {
  auto al = ma_alphas();
  auto c = splitting_from_methodadjoint(al);
  REQUIRE(c.b.size() == 7);
  REQUIRE(c.a.size() == 6);
  CHECK(c.b[0] == al[0]);
  CHECK(c.a[0] == al[0] + al[1]);
  CHECK(c.b[1] == al[1] + al[2]);
  CHECK(c.b[6] == al[11]);
  // 15-digit splitting coefficients
  CHECK(c.b[0] == doctest::Approx(0.082984406417404).epsilon(1e-13));
  CHECK(c.a[0] == doctest::Approx(0.245298957184271).epsilon(1e-13));
  CHECK(c.b[1] == doctest::Approx(0.396309801498368).epsilon(1e-13));

  auto strang = splitting_from_methodadjoint(std::vector<double>{0.5, 0.5});
  CHECK(strang.a == std::vector<double>{1.0});
  CHECK(strang.b == std::vector<double>{0.5, 0.5});

  CHECK_THROWS_AS(splitting_from_methodadjoint(std::vector<double>{0.3, 0.3, 0.4}), Error);
}

TEST_CASE("methodadjoint_from_splitting") {
  const auto& rkn = find_method("RKN6-4(3)");
  SplittingCoefficients c;
  for (const auto& st : rkn.scheme.stages) (st.role == Role::FlowA ? c.a : c.b).push_back(st.coeff);
  auto al = methodadjoint_from_splitting(c.a, c.b);
  auto ref = ma_alphas();
  REQUIRE(al.size() == ref.size());
  for (std::size_t i = 0; i < al.size(); ++i) CHECK(std::abs(al[i] - ref[i]) <= 1e-12);

  auto s = methodadjoint_from_splitting(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5});
  CHECK(s == std::vector<double>{0.5, 0.5});

  CHECK_THROWS_AS(methodadjoint_from_splitting(std::vector<double>{1.0},
                                               std::vector<double>{0.5, 0.6}),
                  Error);
  CHECK_THROWS_AS(methodadjoint_from_splitting(std::vector<double>{0.5, 0.5},
                                               std::vector<double>{1.0}),
                  Error);
}

TEST_CASE("conversion roundtrips") {
  auto al = ma_alphas();
  auto c = splitting_from_methodadjoint(al);
  auto back = methodadjoint_from_splitting(c.a, c.b);
  for (std::size_t i = 0; i < al.size(); ++i) CHECK(std::abs(back[i] - al[i]) <= 1e-13);

  for (const char* name : {"PRK6-4(3)", "RKN6-4(3)"}) {
    SplittingCoefficients s;
    for (const auto& st : find_method(name).scheme.stages)
      (st.role == Role::FlowA ? s.a : s.b).push_back(st.coeff);
    auto c2 = splitting_from_methodadjoint(methodadjoint_from_splitting(s.a, s.b));
    for (std::size_t i = 0; i < s.a.size(); ++i) CHECK(std::abs(c2.a[i] - s.a[i]) <= 1e-13);
    for (std::size_t i = 0; i < s.b.size(); ++i) CHECK(std::abs(c2.b[i] - s.b[i]) <= 1e-13);
  }
}

TEST_CASE("method-adjoint and splitting forms have the same main order") {
  auto al = ma_alphas();
  auto ma = methodadjoint_scheme(al, 4);
  auto sp = splitting_scheme(splitting_from_methodadjoint(al), 4);
  CHECK(verify_order(ma, nullptr, 5).method.order == 4);
  CHECK(verify_order(sp, nullptr, 5).method.order == 4);
  // exponents differ but the step operators agree
  auto d = full_product(ma, 1);
  CHECK(d.coeff(Word({sym::F})) == doctest::Approx(1.0));
}

TEST_CASE("splitting_from_ss") {
  const double a1 = 1.0 / (4.0 - std::cbrt(4.0));
  const double a3 = 1.0 / (1.0 - std::cbrt(16.0));
  const std::vector<double> al = {a1, a1, a3, a1, a1};
  auto c = splitting_from_ss(al, StrangVariant::BAB);
  CHECK(c.outer == Role::FlowB);
  REQUIRE(c.b.size() == 6);
  REQUIRE(c.a.size() == 5);
  // hand merge: B ends are al/2, interior B are (al_i + al_{i+1})/2, A are al
  CHECK(c.b[0] == doctest::Approx(a1 / 2));
  CHECK(c.b[5] == doctest::Approx(a1 / 2));
  CHECK(c.b[1] == doctest::Approx(a1));
  CHECK(c.b[2] == doctest::Approx((a1 + a3) / 2));
  for (int i = 0; i < 5; ++i) CHECK(c.a[i] == al[i]);
  CHECK(splitting_scheme(c, 4).stages.size() == 11);

  auto aba = splitting_from_ss(al, StrangVariant::ABA);
  CHECK(aba.outer == Role::FlowA);
  CHECK(aba.a.size() == 6);

  auto one = splitting_from_ss(std::vector<double>{1.0}, StrangVariant::BAB);
  CHECK(one.b == std::vector<double>{0.5, 0.5});
  CHECK(one.a == std::vector<double>{1.0});

  for (auto v : {StrangVariant::BAB, StrangVariant::ABA}) {
    auto sp = splitting_scheme(splitting_from_ss(al, v), 4);
    CHECK(verify_order(sp, nullptr, 6).method.order == 4);
  }
}

TEST_CASE("SS scheme and its merged splitting give the same step") {
  const auto& m = find_method("SS7-6(4)");
  auto sp = splitting_scheme(splitting_from_ss(m.scheme.coefficients(), StrangVariant::BAB), 6);
  auto flows = kepler_flows();
  State x = kepler_init(0.5).to_state();
  auto a = step_with_stages(m.scheme, flows, x, 0.1);
  auto b = step_with_stages(sp, flows, x, 0.1);
  CHECK((a.x_next - b.x_next).norm() <= 1e-13);
}

TEST_CASE("replicate_halved") {
  auto base = ss_scheme(std::vector<double>{0.6, -0.2, 0.6}, 2);
  auto r = replicate_halved(base, 2);
  CHECK(r.stages.size() == 6);
  CHECK(std::abs(std::accumulate(r.stages.begin(), r.stages.end(), 0.0,
                                 [](double s, const Stage& st) { return s + st.coeff; }) -
                 1.0) <= 1e-15);
  CHECK(r.stages[3].coeff == 0.3);

  auto flows = kepler_flows();
  State x = kepler_init(0.3).to_state();
  const double h = 0.2;
  auto once = step_with_stages(r, flows, x, h).x_next;
  auto half = step_with_stages(base, flows, x, h / 2).x_next;
  auto twice = step_with_stages(base, flows, half, h / 2).x_next;
  CHECK((once - twice).norm() <= 1e-15);

  CHECK_THROWS_AS(replicate_halved(base, 1), Error);
  CHECK_THROWS_AS(replicate_halved(find_method("MA6-4(3)").scheme, 2), Error);
}

TEST_CASE("scheme validation") {
  CHECK_THROWS_AS(ss_scheme(std::vector<double>{0.5, 0.4}, 2), Error);
  CHECK_THROWS_AS(methodadjoint_scheme(std::vector<double>{0.5, 0.5, 0.0}, 1), Error);
  SchemeSpec bad;
  bad.family = Family::MethodAdjoint;
  bad.stages = {{Role::BasicChi, 0.5}, {Role::AdjointChi, 0.5}};
  CHECK_THROWS_AS(bad.validate(), Error);
  SplittingCoefficients c;
  c.a = {0.9};
  c.b = {0.5, 0.5};
  CHECK_THROWS_AS(splitting_scheme(c, 2), Error);
  CHECK_THROWS_AS(SchemeSpec{}.validate(), Error);
}

TEST_CASE("mirror_pairs") {
  auto p = mirror_pairs(5, +1);
  REQUIRE(p.size() == 2);
  CHECK(p[0].i == 1);
  CHECK(p[0].j == 4);
  CHECK(p[1].i == 2);
  CHECK(p[1].j == 3);
  CHECK(mirror_pairs(7, -1)[2].sign == -1);
  CHECK(mirror_pairs(6, +1).size() == 2);
}
