#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embedsplit/estgen.hpp"

namespace embedsplit {

/// How to rebuild an estimator from the scheme: target order plus the sign
/// pairs and pins the weights are constrained by.
struct EstimatorRecipe {
  int order = 0;
  std::vector<SignedPair> symmetry;
  std::vector<Pin> pins;
  std::string note;
};

struct EmbeddedMethod {
  std::string name;
  SchemeSpec scheme;
  int main_order = 0;
  /// Highest-order estimator first. Two entries make a dual-estimator method
  /// whose step error is combined_error(err_high, err_low).
  std::vector<EstimatorWeights> estimators;
  std::vector<EstimatorRecipe> recipes;
  bool symmetric = false;
  std::string notes;

  bool dual() const { return estimators.size() > 1; }
  /// Order of the lowest-order estimator.
  int estimator_order() const;
};

const std::vector<EmbeddedMethod>& catalog();
const EmbeddedMethod& find_method(std::string_view name);
std::vector<std::string> method_names();

// Scheme constructors

SchemeSpec ss_scheme(std::span<const double> alphas, int order);

/// alphas[0] drives the first (adjoint) stage.
SchemeSpec methodadjoint_scheme(std::span<const double> alphas, int order);

/// Coefficients of a palindromic-shape splitting
///   outer_1 inner_1 outer_2 ... inner_s outer_{s+1}.
/// With the default BAB layout `b` holds the s+1 outer (FlowB) coefficients
/// and `a` the s inner (FlowA) ones; the ABA layout swaps the two.
struct SplittingCoefficients {
  std::vector<double> a;
  std::vector<double> b;
  Role outer = Role::FlowB;
};

SchemeSpec splitting_scheme(const SplittingCoefficients& c, int order);

/// Palindrome of a half list: `head` followed by `middle` (if any) and the
/// reversed head. Used to expand symmetric coefficient tables.
std::vector<double> mirrored(std::span<const double> head, std::span<const double> middle = {});

/// Sign pairs (i, K - i) for i = 1 .. floor((K-1)/2), the usual template for
/// symmetric schemes with K usable outputs.
std::vector<SignedPair> mirror_pairs(std::size_t output_count, int sign);

// Coefficient conversions

SplittingCoefficients splitting_from_methodadjoint(std::span<const double> alphas);
std::vector<double> methodadjoint_from_splitting(std::span<const double> a,
                                                 std::span<const double> b);

enum class StrangVariant { BAB, ABA };
SplittingCoefficients splitting_from_ss(std::span<const double> alphas, StrangVariant variant);

/// m copies of an SS scheme at step h/m, viewed as one method of step h.
SchemeSpec replicate_halved(const SchemeSpec& scheme, int m);

}  // namespace embedsplit
