#pragma once

#include <functional>

#include <Eigen/Dense>

#include "embedsplit/stepper.hpp"

namespace embedsplit {

/// Second-order system y'' = g(y) written as x = (y, y'); FlowA is the
/// drift (y += tau y') and FlowB the kick (y' += tau g(y)).
struct RknSystem {
  int dimension = 1;  // size of y
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> acceleration;
  int kick_cost = 1;

  FlowSet flows() const;
};

/// Builds all five roles from a drift and a kick:
///   S2(tau)         = kick(tau/2) drift(tau) kick(tau/2)
///   BasicChi(tau)   = drift then kick
///   AdjointChi(tau) = kick then drift
FlowSet split_flowset(int dimension, Flow drift, Flow kick, int kick_cost);

struct KeplerState {
  Eigen::Vector2d q;
  Eigen::Vector2d p;
  double mu = 1.0;

  /// Packed as (q1, q2, p1, p2).
  State to_state() const;
  static KeplerState from_state(const State& x, double mu = 1.0);
};

FlowSet kepler_flows(double mu = 1.0);
KeplerState kepler_init(double e);
/// Exact solution at time t from kepler_init(e), mu = 1.
KeplerState kepler_exact(double e, double t);
double kepler_energy(const KeplerState& s);
double kepler_energy(const State& x, double mu = 1.0);

/// Solves M = E - e sin E by Newton iteration from E0 = M + e sin M.
double solve_kepler_equation(double mean_anomaly, double e);

FlowSet harmonic_flows();
/// Rotation (y, v) -> (y cos t + v sin t, -y sin t + v cos t).
State harmonic_exact(const State& x0, double t);
double harmonic_energy(const State& x);

}  // namespace embedsplit
