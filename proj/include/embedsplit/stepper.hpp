#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "embedsplit/schemes.hpp"

namespace embedsplit {

using State = Eigen::VectorXd;

/// Maps (tau, x) to the state after advancing the role's flow by tau.
using Flow = std::function<State(double tau, const State& x)>;

/// Exact or basic flows for each stage role, plus how many force
/// evaluations one application costs.
class FlowSet {
 public:
  explicit FlowSet(int dimension) : dimension_(dimension) {}

  void set(Role role, Flow flow, int cost);

  bool has(Role role) const { return static_cast<bool>(flows_[index(role)]); }
  int cost(Role role) const { return costs_[index(role)]; }
  int dimension() const { return dimension_; }

  /// tau == 0 returns x unchanged without calling the flow.
  State apply(Role role, double tau, const State& x) const;

  /// Force evaluations for one step of the scheme.
  long step_cost(const SchemeSpec& scheme) const;

 private:
  static std::size_t index(Role r) { return static_cast<std::size_t>(r); }

  int dimension_;
  std::array<Flow, 5> flows_{};
  std::array<int, 5> costs_{};
};

struct StepResult {
  State x_next;
  std::vector<State> stages;  // x_{n,0} = x_n .. x_{n,K-1}
  long fevals = 0;
};

StepResult step_with_stages(const SchemeSpec& scheme, const FlowSet& flows, const State& x,
                            double h);

State apply_estimator(std::span<const double> weights, const StepResult& result);
State apply_estimator(const EstimatorWeights& weights, const StepResult& result);

/// err5 * err5 / sqrt(err5^2 + 0.01 err3^2), with 0 when err5 == 0.
double combined_error(double err5, double err3);

enum class ErrorNorm { Euclidean, Max, PositionsEuclidean };

ErrorNorm error_norm_from_string(std::string_view s);
std::string_view to_string(ErrorNorm n);

/// PositionsEuclidean uses the first half of the state.
double error_norm(const State& d, ErrorNorm norm);

/// Per-estimator differences ||x~ - x_next|| and the step error used for
/// control (the single difference, or the combined error for two estimators).
struct StepError {
  std::vector<double> per_estimator;
  double err = 0.0;
};

StepError step_error(const EmbeddedMethod& method, const StepResult& result, ErrorNorm norm);

struct ControllerConfig {
  double tol = 1e-8;
  double fac = 0.9;
  double facmin = 0.2;
  double facmax = 5.0;
  double h_init = 1e-2;
  int max_rejects = 20;
  ErrorNorm error_norm = ErrorNorm::Euclidean;
  /// Order l used in the exponent 1/(l+1). Defaults to the estimator order,
  /// or main_order - 1 when the combined error of two estimators is used.
  std::optional<int> exponent_order;

  void validate() const;
};

/// Controller order for a method under a config.
int controller_order(const EmbeddedMethod& method, const ControllerConfig& cfg);

/// h * min(facmax, max(facmin, fac * (tol/err)^(1/(order+1)))).
double propose_step(double h, double err, int order, const ControllerConfig& cfg);

struct Trajectory {
  std::vector<double> t;
  std::vector<State> x;
  std::vector<double> h;    // step that produced x[n]; h[0] = 0
  std::vector<double> err;  // controller error of that step; err[0] = 0
  std::vector<std::vector<double>> estimator_err;  // per estimator, same indexing
};

struct RunStats {
  long accepted = 0;
  long rejected = 0;
  long fevals = 0;
  bool partial_final_step = false;
  double max_err = 0.0;
};

struct IntegrationResult {
  Trajectory trajectory;
  RunStats stats;
};

/// Receives each accepted step; see CsvTrajectorySink.
class TrajectorySink {
 public:
  virtual ~TrajectorySink() = default;
  virtual void record(double t, const State& x, double err, double h) = 0;
};

/// Writes "t,h,err,x0,x1,..." rows with 17 significant digits.
class CsvTrajectorySink : public TrajectorySink {
 public:
  explicit CsvTrajectorySink(std::ostream& out);
  void record(double t, const State& x, double err, double h) override;

 private:
  std::ostream& out_;
  bool header_written_ = false;
};

struct FixedOptions {
  ErrorNorm error_norm = ErrorNorm::Euclidean;
  TrajectorySink* sink = nullptr;
  bool store_states = true;
};

IntegrationResult integrate_fixed(const EmbeddedMethod& method, const FlowSet& flows,
                                  const State& x0, double h, double t0, double t_end,
                                  const FixedOptions& opts = {});

IntegrationResult integrate_adaptive(const EmbeddedMethod& method, const FlowSet& flows,
                                     const State& x0, double t0, double t_end,
                                     const ControllerConfig& cfg, TrajectorySink* sink = nullptr);

}  // namespace embedsplit
