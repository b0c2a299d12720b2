#include "embedsplit/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "embedsplit/error.hpp"

namespace embedsplit {

int EmbeddedMethod::estimator_order() const {
  if (estimators.empty()) throw Error("method " + name + " has no estimator");
  int lowest = estimators.front().order;
  for (const auto& e : estimators) lowest = std::min(lowest, e.order);
  return lowest;
}

SchemeSpec ss_scheme(std::span<const double> alphas, int order) {
  SchemeSpec s;
  s.family = Family::SS;
  s.declared_order = order;
  for (double a : alphas) s.stages.push_back({Role::S2, a});
  s.validate();
  return s;
}

SchemeSpec methodadjoint_scheme(std::span<const double> alphas, int order) {
  SchemeSpec s;
  s.family = Family::MethodAdjoint;
  s.declared_order = order;
  for (std::size_t k = 0; k < alphas.size(); ++k)
    s.stages.push_back({k % 2 == 0 ? Role::AdjointChi : Role::BasicChi, alphas[k]});
  s.validate();
  return s;
}

SchemeSpec splitting_scheme(const SplittingCoefficients& c, int order) {
  const bool bab = c.outer == Role::FlowB;
  if (!bab && c.outer != Role::FlowA) throw Error("splitting outer flow must be FlowA or FlowB");
  const auto& outer = bab ? c.b : c.a;
  const auto& inner = bab ? c.a : c.b;
  const Role inner_role = bab ? Role::FlowA : Role::FlowB;
  if (outer.size() != inner.size() + 1)
    throw Error("splitting needs one more outer coefficient than inner ones (got " +
                std::to_string(outer.size()) + " and " + std::to_string(inner.size()) + ")");
  SchemeSpec s;
  s.family = Family::Splitting;
  s.declared_order = order;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    s.stages.push_back({c.outer, outer[i]});
    s.stages.push_back({inner_role, inner[i]});
  }
  s.stages.push_back({c.outer, outer.back()});
  s.validate();
  return s;
}

std::vector<double> mirrored(std::span<const double> head, std::span<const double> middle) {
  std::vector<double> out(head.begin(), head.end());
  out.insert(out.end(), middle.begin(), middle.end());
  out.insert(out.end(), head.rbegin(), head.rend());
  return out;
}

std::vector<SignedPair> mirror_pairs(std::size_t output_count, int sign) {
  std::vector<SignedPair> out;
  const int k = static_cast<int>(output_count);
  for (int i = 1; i < k - i; ++i) out.push_back({i, k - i, sign});
  return out;
}

SplittingCoefficients splitting_from_methodadjoint(std::span<const double> alphas) {
  if (alphas.empty() || alphas.size() % 2 != 0)
    throw Error("method-adjoint coefficient list must have even, nonzero length");
  const std::size_t s = alphas.size() / 2;
  SplittingCoefficients out;
  out.b.push_back(alphas[0]);
  for (std::size_t j = 1; j <= s; ++j) {
    out.a.push_back(alphas[2 * j - 1] + alphas[2 * j - 2]);
    const double next = 2 * j < alphas.size() ? alphas[2 * j] : 0.0;
    out.b.push_back(next + alphas[2 * j - 1]);
  }
  return out;
}

std::vector<double> methodadjoint_from_splitting(std::span<const double> a,
                                                 std::span<const double> b) {
  if (a.empty() || b.size() != a.size() + 1)
    throw Error("splitting needs s inner and s+1 outer coefficients");
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sa - sb) > 1e-12 * std::max(1.0, std::abs(sa)))
    throw Error("coefficient sums differ (" + std::to_string(sa) + " vs " + std::to_string(sb) +
                "); no method-adjoint form exists");
  const std::size_t s = a.size();
  // alpha is 1-based here, alpha[0] is the consistency remainder
  std::vector<double> alpha(2 * s + 1, 0.0);
  alpha[2 * s] = b[s];
  for (std::size_t j = s; j >= 1; --j) {
    alpha[2 * j - 1] = a[j - 1] - alpha[2 * j];
    alpha[2 * j - 2] = b[j - 1] - alpha[2 * j - 1];
  }
  if (std::abs(alpha[0]) > 1e-12)
    throw Error("method-adjoint recursion leaves remainder " + std::to_string(alpha[0]));
  return {alpha.begin() + 1, alpha.end()};
}

SplittingCoefficients splitting_from_ss(std::span<const double> alphas, StrangVariant variant) {
  if (alphas.empty()) throw Error("empty coefficient list");
  std::vector<double> outer;
  outer.push_back(alphas.front() / 2);
  for (std::size_t k = 1; k < alphas.size(); ++k) outer.push_back((alphas[k - 1] + alphas[k]) / 2);
  outer.push_back(alphas.back() / 2);
  std::vector<double> inner(alphas.begin(), alphas.end());

  SplittingCoefficients out;
  if (variant == StrangVariant::BAB) {
    out.b = std::move(outer);
    out.a = std::move(inner);
    out.outer = Role::FlowB;
  } else {
    out.a = std::move(outer);
    out.b = std::move(inner);
    out.outer = Role::FlowA;
  }
  return out;
}

SchemeSpec replicate_halved(const SchemeSpec& scheme, int m) {
  if (scheme.family != Family::SS) throw Error("replicate_halved needs an SS scheme");
  if (m < 2) throw Error("replication count must be at least 2");
  SchemeSpec out;
  out.family = Family::SS;
  out.declared_order = scheme.declared_order;
  for (int r = 0; r < m; ++r)
    for (const Stage& st : scheme.stages) out.stages.push_back({st.role, st.coeff / m});
  out.validate();
  return out;
}

}  // namespace embedsplit
