#include <cmath>

#include "embedsplit/error.hpp"
#include "embedsplit/schemes.hpp"

namespace embedsplit {

namespace {

// Expands half-tables of weights for schemes whose estimator is
//   w0 x_n + sum_i w_i (x_{n,i} +/- x_{n,K-i}).
std::vector<double> mirrored_weights(double w0, std::span<const double> half, std::size_t count,
                                     int sign, std::span<const double> middle = {}) {
  std::vector<double> w(count, 0.0);
  w[0] = w0;
  for (std::size_t i = 0; i < half.size(); ++i) {
    w[i + 1] = half[i];
    w[count - 1 - i] = sign * half[i];
  }
  for (std::size_t i = 0; i < middle.size(); ++i) w[half.size() + 1 + i] = middle[i];
  return w;
}

EstimatorWeights tabulated(std::vector<double> w, int order) {
  EstimatorWeights e;
  e.w = std::move(w);
  e.order = order;
  return e;
}

EstimatorWeights derived(const SchemeSpec& scheme, const EstimatorRecipe& r) {
  auto sys = assemble_system(scheme, r.order);
  auto e = solve_weights(sys, r.symmetry, r.pins);
  if (!e.feasible)
    throw Error("catalog estimator of order " + std::to_string(r.order) + " is infeasible");
  return e;
}

EmbeddedMethod suzuki5() {
  const double a1 = 1.0 / (4.0 - std::cbrt(4.0));
  const double a3 = 1.0 / (1.0 - std::cbrt(16.0));
  const double head[] = {a1, a1};
  const double mid[] = {a3};
  EmbeddedMethod m;
  m.name = "SS5-4(3)";
  m.scheme = ss_scheme(mirrored(head, mid), 4);
  m.main_order = 4;
  m.symmetric = true;
  m.recipes.push_back({3, mirror_pairs(5, +1), {}, "unique under the symmetric template"});
  m.estimators.push_back(derived(m.scheme, m.recipes[0]));
  m.notes = "Suzuki 5-stage fourth-order composition; weights solved from the conditions";
  return m;
}

EmbeddedMethod mclachlan7() {
  const double a1 = 1.0 / (6.0 - std::cbrt(6.0));
  const double a4 = 1.0 / (1.0 - std::cbrt(36.0));
  const double head[] = {a1, a1, a1};
  const double mid[] = {a4};
  EmbeddedMethod m;
  m.name = "SS7-4(3)";
  m.scheme = ss_scheme(mirrored(head, mid), 4);
  m.main_order = 4;
  m.symmetric = true;
  m.recipes.push_back({3, mirror_pairs(7, +1), {{0, -1.0}},
                       "one free parameter; minimal-norm choice of (w1, w2, w3)"});
  m.estimators.push_back(derived(m.scheme, m.recipes[0]));
  m.notes = "McLachlan 7-stage fourth-order composition; free estimator weight set by minimal norm";
  return m;
}

EmbeddedMethod yoshida7() {
  const double head[] = {0.78451361047755726382, 0.23557321335935813369,
                         -1.17767998417887100695};
  const double mid[] = {1.0 - 2.0 * (head[0] + head[1] + head[2])};
  const double w[] = {-0.90983233007647709242, 2.16331188722978237305, 0.55695580387159066608};
  EmbeddedMethod m;
  m.name = "SS7-6(4)";
  m.scheme = ss_scheme(mirrored(head, mid), 6);
  m.main_order = 6;
  m.symmetric = true;
  m.recipes.push_back({4, mirror_pairs(7, -1), {}, "antisymmetric template, unique"});
  m.estimators.push_back(tabulated(mirrored_weights(1.0, w, 7, -1), 4));
  m.notes = "Yoshida 7-stage sixth-order composition";
  return m;
}

EmbeddedMethod sofroniou11() {
  const double head[] = {0.21375583945878254555, 0.18329381407425713911, 0.17692819473098943795,
                         -0.44329082681170215849, 0.11728560432865935385};
  const double mid[] = {1.0 - 2.0 * (head[0] + head[1] + head[2] + head[3] + head[4])};
  const double w[] = {-4.70925883588386976399, 24.61043285614692442695, -19.39218824966918044634,
                      6.17441462307605721006, -5.68340039366993142668};
  EmbeddedMethod m;
  m.name = "SS11-6(5)";
  m.scheme = ss_scheme(mirrored(head, mid), 6);
  m.main_order = 6;
  m.symmetric = true;
  m.recipes.push_back({5, mirror_pairs(11, +1), {}, "unique"});
  m.estimators.push_back(tabulated(mirrored_weights(-1.0, w, 11, +1), 5));
  m.notes = "Sofroniou-Spaletta 11-stage sixth-order composition";
  return m;
}

EmbeddedMethod kahanli17() {
  const double head[] = {0.13020248308889008088, 0.56116298177510838456, -0.38947496264484728641,
                         0.15884190655515560090, -0.39590389413323757734, 0.18453964097831570709,
                         0.25837438768632204729, 0.29501172360931029887};
  double rest = 1.0;
  for (double a : head) rest -= 2.0 * a;
  const double mid[] = {rest};
  const double w5[] = {-2.77811433347582461058, 1.43336350604816157334, -2.35490307436226712937,
                       0.27249477875971647996, 3.09204406313073660493, 1.33511505989947708172,
                       0.0, 0.0};
  const double w3[] = {1.828514038642564624, 0, 0, 0, 0, 0, -0.828514038642564624, 0};

  EmbeddedMethod m;
  m.name = "SS17-8(5)(3)";
  m.scheme = ss_scheme(mirrored(head, mid), 8);
  m.main_order = 8;
  m.symmetric = true;
  // With w7 = w8 = 0 the fifth-order conditions still leave one free
  // direction; w6 is pinned to the tabulated value to select the same member.
  m.recipes.push_back({5, mirror_pairs(17, +1), {{7, 0.0}, {8, 0.0}, {6, w5[5]}},
                       "w7 = w8 = 0; one remaining free weight pinned (w6)"});
  m.recipes.push_back({3, mirror_pairs(17, +1),
                       {{2, 0.0}, {3, 0.0}, {4, 0.0}, {5, 0.0}, {6, 0.0}, {8, 0.0}},
                       "only w1 and w7 nonzero; unique"});
  m.estimators.push_back(tabulated(mirrored_weights(-1.0, w5, 17, +1), 5));
  m.estimators.push_back(tabulated(mirrored_weights(-1.0, w3, 17, +1), 3));
  m.notes = "Kahan-Li 17-stage eighth-order composition with fifth- and third-order estimators";
  return m;
}

EmbeddedMethod methodadjoint6() {
  const double head[] = {0.08298440641740484666, 0.16231455076686615333, 0.23399525073150184666,
                         0.37087741497957699562, -0.40993371990192559562, 0.05976209700657575333};
  const double w[] = {1.48889386198802799037, -0.03049911761922725390, -0.32603028933442750875,
                      -0.05468276894167474320, -0.02746220037522580999};
  const double w6[] = {-0.10043897143494534902};
  EmbeddedMethod m;
  m.name = "MA6-4(3)";
  m.scheme = methodadjoint_scheme(mirrored(head), 4);
  m.main_order = 4;
  m.symmetric = true;
  // Three free directions remain under the symmetric template.
  m.recipes.push_back({3, mirror_pairs(12, +1), {{4, w[3]}, {5, w[4]}, {6, w6[0]}},
                       "three free weights pinned (w4, w5, w6)"});
  m.estimators.push_back(tabulated(mirrored_weights(-1.0, w, 12, +1, w6), 3));
  m.notes = "6-stage fourth-order composition of a first-order method and its adjoint";
  return m;
}

EmbeddedMethod prk6(std::string name, std::span<const double> b_head, std::span<const double> a_head,
                    double w2, double w4, std::string notes) {
  const double b4[] = {1.0 - 2.0 * (b_head[0] + b_head[1] + b_head[2])};
  const double a_full[] = {a_head[0], a_head[1], 0.5 - (a_head[0] + a_head[1])};
  SplittingCoefficients c;
  c.b = mirrored(b_head, b4);
  c.a = mirrored(a_full);
  const double w[] = {1.0, w2, -w2, w4, -w4, 0.0};

  EmbeddedMethod m;
  m.name = std::move(name);
  m.scheme = splitting_scheme(c, 4);
  m.main_order = 4;
  m.symmetric = true;
  m.recipes.push_back({3, mirror_pairs(13, +1), {{6, 0.0}}, "w6 = w7 = 0; unique"});
  m.estimators.push_back(tabulated(mirrored_weights(-1.0, w, 13, +1), 3));
  m.notes = std::move(notes);
  return m;
}

std::vector<EmbeddedMethod> build_catalog() {
  std::vector<EmbeddedMethod> out;
  out.push_back(suzuki5());
  out.push_back(mclachlan7());
  out.push_back(yoshida7());
  out.push_back(sofroniou11());
  out.push_back(kahanli17());
  out.push_back(methodadjoint6());
  {
    const double b[] = {0.07920369643119565, 0.35317290604977372, -0.04206508035771952};
    const double a[] = {0.209515106613361, -0.143851773179818};
    out.push_back(prk6("PRK6-4(3)", b, a, 0.43458657385433203071, 0.27273581001405423884,
                       "6-stage fourth-order splitting for general separable systems"));
  }
  {
    const double b[] = {0.082984406417404, 0.396309801498368, -0.039056304922348};
    const double a[] = {0.245298957184271, 0.604872665711078};
    out.push_back(prk6("RKN6-4(3)", b, a, 0.43541552923952936004, -0.17978889668391821731,
                       "6-stage fourth-order splitting for y'' = g(y)"));
  }
  return out;
}

}  // namespace

const std::vector<EmbeddedMethod>& catalog() {
  static const std::vector<EmbeddedMethod> methods = build_catalog();
  return methods;
}

const EmbeddedMethod& find_method(std::string_view name) {
  for (const auto& m : catalog())
    if (m.name == name) return m;
  std::string known;
  for (const auto& m : catalog()) known += (known.empty() ? "" : ", ") + m.name;
  throw Error("unknown method '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<std::string> method_names() {
  std::vector<std::string> out;
  for (const auto& m : catalog()) out.push_back(m.name);
  return out;
}

}  // namespace embedsplit
