#include "embedsplit/estgen.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "embedsplit/error.hpp"

namespace embedsplit {

namespace {

constexpr double kConsistencyTolerance = 1e-10;

std::string stage_label(std::size_t k) { return "stage " + std::to_string(k + 1); }

}  // namespace

std::vector<double> SchemeSpec::coefficients() const {
  std::vector<double> out;
  out.reserve(stages.size());
  for (const Stage& s : stages) out.push_back(s.coeff);
  return out;
}

void SchemeSpec::validate() const {
  if (stages.empty()) throw Error("scheme has no stages");
  for (std::size_t k = 0; k < stages.size(); ++k) {
    if (!role_allowed(family, stages[k].role))
      throw Error(stage_label(k) + " has role " + std::string(to_string(stages[k].role)) +
                  ", not allowed in the " + std::string(to_string(family)) + " family");
    if (!std::isfinite(stages[k].coeff)) throw Error(stage_label(k) + " has a non-finite coefficient");
  }

  auto require_sum = [](double sum, const char* what) {
    if (std::abs(sum - 1.0) > kConsistencyTolerance)
      throw Error(std::string("inconsistent scheme: ") + what + " sum to " + std::to_string(sum) +
                  ", expected 1");
  };

  switch (family) {
    case Family::SS: {
      double sum = 0.0;
      for (const Stage& s : stages) sum += s.coeff;
      require_sum(sum, "coefficients");
      break;
    }
    case Family::MethodAdjoint: {
      if (stages.size() % 2 != 0)
        throw Error("method-adjoint scheme needs an even number of stages");
      double sum = 0.0;
      for (std::size_t k = 0; k < stages.size(); ++k) {
        Role expected = k % 2 == 0 ? Role::AdjointChi : Role::BasicChi;
        if (stages[k].role != expected)
          throw Error(stage_label(k) + " should be " + std::string(to_string(expected)));
        sum += stages[k].coeff;
      }
      require_sum(sum, "coefficients");
      break;
    }
    case Family::Splitting: {
      if (stages.size() % 2 != 1)
        throw Error("splitting scheme needs an odd number of stages (outer flow at both ends)");
      const Role outer = stages.front().role;
      const Role inner = outer == Role::FlowB ? Role::FlowA : Role::FlowB;
      double outer_sum = 0.0;
      double inner_sum = 0.0;
      for (std::size_t k = 0; k < stages.size(); ++k) {
        Role expected = k % 2 == 0 ? outer : inner;
        if (stages[k].role != expected)
          throw Error(stage_label(k) + " should be " + std::string(to_string(expected)));
        (k % 2 == 0 ? outer_sum : inner_sum) += stages[k].coeff;
      }
      require_sum(outer_sum, "outer flow coefficients");
      require_sum(inner_sum, "inner flow coefficients");
      break;
    }
  }
}

namespace {

std::vector<TruncatedSeries> all_products(const SchemeSpec& scheme, int order, bool with_final) {
  scheme.validate();
  const std::size_t count = with_final ? scheme.stages.size() + 1 : scheme.stages.size();
  std::vector<TruncatedSeries> out;
  out.reserve(count);
  out.push_back(TruncatedSeries::identity(order));
  for (std::size_t k = 0; out.size() < count; ++k) {
    const Stage& st = scheme.stages[k];
    out.push_back(series_mul(out.back(),
                             series_exp(stage_series(scheme.family, st.role, st.coeff, order))));
  }
  return out;
}

}  // namespace

std::vector<TruncatedSeries> prefix_products(const SchemeSpec& scheme, int order) {
  return all_products(scheme, order, false);
}

TruncatedSeries full_product(const SchemeSpec& scheme, int order) {
  return std::move(all_products(scheme, order, true).back());
}

long count_conditions(Family family, int order) {
  if (order < 1) throw Error("estimator order must be at least 1");
  // Words are counted by grade with a recurrence rather than enumerated, so
  // orders beyond the algebra's truncation limit are still answerable.
  std::vector<long> by_grade(static_cast<std::size_t>(order) + 1, 0);
  by_grade[0] = 1;
  for (int g = 1; g <= order; ++g) {
    long n = 0;
    switch (family) {
      case Family::SS:
        n = by_grade[g - 1];
        for (int p = 3; p <= g; p += 2) n += by_grade[g - p];
        break;
      case Family::MethodAdjoint:
        for (int p = 1; p <= g; ++p) n += by_grade[g - p];
        break;
      case Family::Splitting:
        n = 2 * by_grade[g - 1];
        break;
    }
    by_grade[g] = n;
  }
  return std::accumulate(by_grade.begin() + 1, by_grade.end(), 0L);
}

WeightSystem assemble_system(const SchemeSpec& scheme, int order) {
  const auto products = prefix_products(scheme, order);
  const auto target = exact_flow_series(scheme.family, order);

  WeightSystem sys;
  sys.family = scheme.family;
  sys.order = order;
  sys.rows = enumerate_words(GeneratorSet::make(scheme.family, order), order);

  const auto nrows = static_cast<Eigen::Index>(sys.rows.size());
  const auto ncols = static_cast<Eigen::Index>(products.size());
  sys.matrix.resize(nrows, ncols);
  sys.rhs.resize(nrows);
  for (Eigen::Index r = 0; r < nrows; ++r) {
    const Word& w = sys.rows[static_cast<std::size_t>(r)];
    sys.rhs(r) = target.coeff(w);
    for (Eigen::Index k = 0; k < ncols; ++k)
      sys.matrix(r, k) = products[static_cast<std::size_t>(k)].coeff(w);
  }
  return sys;
}

namespace {

// Union-find over weight indices where each link carries a sign.
class SignedUnion {
 public:
  explicit SignedUnion(int n) : parent_(n), sign_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  // Returns (root, s) with w_i = s * w_root.
  std::pair<int, int> find(int i) {
    if (parent_[i] == i) return {i, 1};
    auto [root, s] = find(parent_[i]);
    parent_[i] = root;
    sign_[i] *= s;
    return {root, sign_[i]};
  }

  // Records w_i = s * w_j.
  void unite(int i, int j, int s) {
    auto [ri, si] = find(i);
    auto [rj, sj] = find(j);
    const int link = si * s * sj;
    if (ri == rj) {
      if (link != 1)
        throw Error("symmetry constraints force w_" + std::to_string(i) + " = -w_" +
                    std::to_string(i) + "; pin it to zero explicitly instead");
      return;
    }
    // keep the smaller index as representative
    if (ri < rj) {
      parent_[rj] = ri;
      sign_[rj] = link;
    } else {
      parent_[ri] = rj;
      sign_[ri] = link;
    }
  }

 private:
  std::vector<int> parent_;
  std::vector<int> sign_;
};

}  // namespace

EstimatorWeights solve_weights(const WeightSystem& system, std::span<const SignedPair> symmetry,
                               std::span<const Pin> pins) {
  const int K = static_cast<int>(system.matrix.cols());
  auto check_index = [K](int i) {
    if (i < 0 || i >= K)
      throw Error("weight index " + std::to_string(i) + " outside [0, " + std::to_string(K) + ")");
  };

  SignedUnion groups(K);
  for (const SignedPair& p : symmetry) {
    check_index(p.i);
    check_index(p.j);
    if (p.sign != 1 && p.sign != -1) throw Error("symmetry sign must be +1 or -1");
    groups.unite(p.i, p.j, p.sign);
  }

  // one reduced variable per group, numbered by representative
  std::vector<int> var_of_root(K, -1);
  std::vector<int> var(K);
  std::vector<int> sign(K);
  int nvars = 0;
  for (int i = 0; i < K; ++i) {
    auto [root, s] = groups.find(i);
    if (var_of_root[root] < 0) var_of_root[root] = nvars++;
    var[i] = var_of_root[root];
    sign[i] = s;
  }

  std::vector<std::optional<double>> fixed(nvars);
  for (const Pin& p : pins) {
    check_index(p.index);
    const double v = p.value * sign[p.index];
    auto& slot = fixed[var[p.index]];
    if (slot && std::abs(*slot - v) > 1e-14 * std::max(1.0, std::abs(v)))
      throw Error("inconsistent pins on weight " + std::to_string(p.index));
    slot = v;
  }

  Eigen::MatrixXd expand = Eigen::MatrixXd::Zero(K, nvars);
  for (int i = 0; i < K; ++i) expand(i, var[i]) = sign[i];
  const Eigen::MatrixXd reduced = system.matrix * expand;

  std::vector<int> free_vars;
  Eigen::VectorXd values = Eigen::VectorXd::Zero(nvars);
  Eigen::VectorXd rhs = system.rhs;
  for (int v = 0; v < nvars; ++v) {
    if (fixed[v]) {
      values(v) = *fixed[v];
      rhs -= reduced.col(v) * *fixed[v];
    } else {
      free_vars.push_back(v);
    }
  }

  EstimatorWeights out;
  out.order = system.order;
  if (!free_vars.empty()) {
    Eigen::MatrixXd a(reduced.rows(), static_cast<Eigen::Index>(free_vars.size()));
    for (std::size_t c = 0; c < free_vars.size(); ++c)
      a.col(static_cast<Eigen::Index>(c)) = reduced.col(free_vars[c]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankTolerance);
    const Eigen::VectorXd sol = svd.solve(rhs);
    for (std::size_t c = 0; c < free_vars.size(); ++c)
      values(free_vars[c]) = sol(static_cast<Eigen::Index>(c));
    out.nullspace_dim = static_cast<int>(free_vars.size()) - static_cast<int>(svd.rank());
  }

  const Eigen::VectorXd w = expand * values;
  out.w.assign(w.data(), w.data() + w.size());
  out.residual = (system.matrix * w - system.rhs).norm();
  out.feasible = out.residual <= kFeasibilityTolerance * (1.0 + system.rhs.norm());
  return out;
}

GradeReport grade_residuals(const TruncatedSeries& s, Family family, double tol) {
  const TruncatedSeries diff = s - exact_flow_series(family, s.order());
  GradeReport rep;
  rep.residuals.resize(static_cast<std::size_t>(s.order()) + 1, 0.0);
  for (const auto& [w, c] : diff.terms()) {
    auto& r = rep.residuals[static_cast<std::size_t>(w.grade())];
    r = std::max(r, std::abs(c));
  }
  rep.order = -1;
  for (std::size_t g = 0; g < rep.residuals.size() && rep.residuals[g] <= tol; ++g)
    rep.order = static_cast<int>(g);
  return rep;
}

OrderReport verify_order(const SchemeSpec& scheme, const EstimatorWeights* weights, int order,
                         double tol) {
  OrderReport rep;
  auto products = all_products(scheme, order, true);
  rep.method = grade_residuals(products.back(), scheme.family, tol);
  if (weights) {
    if (weights->w.size() != scheme.output_count())
      throw Error("estimator has " + std::to_string(weights->w.size()) + " weights, scheme has " +
                  std::to_string(scheme.output_count()) + " usable outputs");
    TruncatedSeries combo(order);
    for (std::size_t k = 0; k < weights->w.size(); ++k) combo += weights->w[k] * products[k];
    rep.estimator = grade_residuals(combo, scheme.family, tol);
  }
  return rep;
}

}  // namespace embedsplit
