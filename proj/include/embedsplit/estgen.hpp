#pragma once

// Estimator weight derivation.
//
// For a scheme with stage operators E_1, ..., E_K+1 the usable outputs are
// x_{n,0} = x_n and the states after each stage except the last. Their
// operators are the prefix products P_0 = I, P_k = P_{k-1} E_k. An estimator
// of order l is a weight vector w with
//
//     sum_k w_k P_k = exp(target) + O(h^{l+1}),
//
// which is linear in w: one equation per word of grade <= l.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "embedsplit/opalg.hpp"

namespace embedsplit {

struct Stage {
  Role role;
  double coeff;
};

struct SchemeSpec {
  Family family = Family::SS;
  std::vector<Stage> stages;
  int declared_order = 0;

  /// Number of outputs an estimator may combine: x_n plus every stage
  /// output except the final one.
  std::size_t output_count() const { return stages.size(); }

  /// Throws if the role pattern or consistency sums are violated.
  void validate() const;

  /// Coefficients read from the scheme in stage order.
  std::vector<double> coefficients() const;
};

/// A constraint w_i = sign * w_j with sign = +1 or -1.
struct SignedPair {
  int i;
  int j;
  int sign = 1;
};

struct Pin {
  int index;
  double value;
};

struct WeightSystem {
  Family family = Family::SS;
  int order = 0;
  std::vector<Word> rows;   // rows[0] is the empty word
  Eigen::MatrixXd matrix;   // rows x K, entry = coefficient of the word in P_k
  Eigen::VectorXd rhs;      // coefficient of the word in the exact flow
};

struct EstimatorWeights {
  std::vector<double> w;
  int order = 0;
  double residual = 0.0;
  int nullspace_dim = 0;
  bool feasible = true;
};

/// P_0 .. P_{K-1}; the full product is not part of the list.
std::vector<TruncatedSeries> prefix_products(const SchemeSpec& scheme, int order);

/// The operator of one complete step, P_K.
TruncatedSeries full_product(const SchemeSpec& scheme, int order);

/// Number of nonempty words of grade <= order over the family's generators.
long count_conditions(Family family, int order);

WeightSystem assemble_system(const SchemeSpec& scheme, int order);

/// Minimal-norm least-squares weights under optional sign-pair and pin
/// constraints. Feasibility is reported in the result rather than thrown;
/// contradictory constraints throw.
EstimatorWeights solve_weights(const WeightSystem& system,
                               std::span<const SignedPair> symmetry = {},
                               std::span<const Pin> pins = {});

inline constexpr double kRankTolerance = 1e-9;
inline constexpr double kFeasibilityTolerance = 1e-10;
inline constexpr double kOrderTolerance = 1e-10;

struct GradeReport {
  std::vector<double> residuals;  // index = grade, 0..N
  int order = -1;                 // largest g with residuals[1..g] <= tol

  /// True if every computed grade passed; the order is then only a lower bound.
  bool saturated() const { return order + 1 == static_cast<int>(residuals.size()); }
};

struct OrderReport {
  GradeReport method;
  std::optional<GradeReport> estimator;
};

OrderReport verify_order(const SchemeSpec& scheme, const EstimatorWeights* weights,
                         int order, double tol = kOrderTolerance);

/// Grade-wise residual of an arbitrary series against the exact flow.
GradeReport grade_residuals(const TruncatedSeries& s, Family family, double tol);

}  // namespace embedsplit
