#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "embedsplit/stepper.hpp"

namespace embedsplit {

struct ScanConfig {
  std::vector<std::string> methods;
  std::vector<double> eccentricities{0.2, 0.4, 0.6, 0.8};
  std::vector<double> steps;  // h values
  double t_end = 20.0;
  ErrorNorm estimator_norm = ErrorNorm::Euclidean;  // used for E2
  unsigned threads = 0;                             // 0: hardware concurrency

  void validate() const;
};

/// n values geometrically spaced from h_max down to h_min (inclusive).
std::vector<double> geometric_steps(double h_max, double h_min, int n);

struct RunRecord {
  std::string method;
  double e = 0.0;
  double h = 0.0;
  long nsteps = 0;
  long fevals = 0;
  bool ok = true;
  std::string error;  // why the run failed; not written to CSV
  double E1_full = 0.0;
  double E1_pos = 0.0;
  double E2 = 0.0;                  // controller error: combined for two estimators
  std::optional<double> E2_low;     // lowest-order estimator alone, dual methods only
  double energy_drift = 0.0;        // max |H(x_n) - H(x_0)|
};

/// One fixed-step Kepler run over [0, t_end] with exact-solution errors.
RunRecord run_single(const EmbeddedMethod& method, double e, double h, double t_end,
                     ErrorNorm estimator_norm = ErrorNorm::Euclidean);

/// Grid over methods x eccentricities x steps, in that nesting order.
/// Failed integrations become rows with ok == false.
std::vector<RunRecord> run_scan(const ScanConfig& cfg);

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(std::istream& in);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms deviation of log10 y from the line
  int points = 0;
};

/// Least-squares line through (log10 x, log10 y) for y in [lo, hi]. With
/// tail > 0 only the `tail` in-window points of smallest x are used.
OrderFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double lo = 1e-10,
                    double hi = 1e-3, int tail = 0);

/// Slope of log E1_full against log h. Records must share method and e.
OrderFit fit_order(const std::vector<RunRecord>& records, double lo = 1e-10, double hi = 1e-3,
                   int tail = 0);

struct AdaptiveRecord {
  std::string method;
  double e = 0.0;
  double tol = 0.0;
  bool aborted = false;
  std::string error;
  double achieved = 0.0;  // max ||x_exact(t_n) - x_n|| over accepted steps
  long accepted = 0;
  long rejected = 0;
  long fevals = 0;
  double h_min = 0.0;
  double h_max = 0.0;
  double h_mean = 0.0;
  double h_cv = 0.0;  // stddev / mean of accepted h
  // h statistics skip the startup ramp and the final clipped step
};

AdaptiveRecord run_adaptive(const EmbeddedMethod& method, double e, double tol, double t_end,
                            ControllerConfig cfg = {});

std::vector<AdaptiveRecord> run_adaptive_sweep(const EmbeddedMethod& method, double e,
                                               const std::vector<double>& tols,
                                               double t_end = 20.0, ControllerConfig cfg = {});

void write_adaptive_csv(std::ostream& out, const std::vector<AdaptiveRecord>& records);

}  // namespace embedsplit
