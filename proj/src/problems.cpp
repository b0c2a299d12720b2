#include "embedsplit/problems.hpp"

#include <cmath>
#include <numbers>

#include "embedsplit/error.hpp"

namespace embedsplit {

FlowSet split_flowset(int dimension, Flow drift, Flow kick, int kick_cost) {
  FlowSet fs(dimension);
  fs.set(Role::FlowA, drift, 0);
  fs.set(Role::FlowB, kick, kick_cost);
  fs.set(Role::S2,
         [drift, kick](double tau, const State& x) {
           return kick(tau / 2, drift(tau, kick(tau / 2, x)));
         },
         2 * kick_cost);
  fs.set(Role::BasicChi,
         [drift, kick](double tau, const State& x) { return kick(tau, drift(tau, x)); },
         kick_cost);
  fs.set(Role::AdjointChi,
         [drift, kick](double tau, const State& x) { return drift(tau, kick(tau, x)); },
         kick_cost);
  return fs;
}

FlowSet RknSystem::flows() const {
  if (dimension < 1) throw Error("RKN system dimension must be positive");
  if (!acceleration) throw Error("RKN system has no acceleration");
  const int d = dimension;
  auto accel = acceleration;
  Flow drift = [d](double tau, const State& x) {
    State out = x;
    out.head(d) += tau * x.tail(d);
    return out;
  };
  Flow kick = [d, accel](double tau, const State& x) {
    State out = x;
    out.tail(d) += tau * accel(x.head(d));
    return out;
  };
  return split_flowset(2 * d, std::move(drift), std::move(kick), kick_cost);
}

State KeplerState::to_state() const {
  State x(4);
  x << q(0), q(1), p(0), p(1);
  return x;
}

KeplerState KeplerState::from_state(const State& x, double mu) {
  if (x.size() != 4) throw Error("Kepler state must have 4 components");
  KeplerState s;
  s.q = x.head<2>();
  s.p = x.tail<2>();
  s.mu = mu;
  return s;
}

FlowSet kepler_flows(double mu) {
  if (!(mu > 0.0)) throw Error("gravitational parameter must be positive");
  RknSystem sys;
  sys.dimension = 2;
  sys.acceleration = [mu](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    const double r = q.norm();
    if (r == 0.0) throw Error("Kepler kick at the origin");
    return -mu / (r * r * r) * q;
  };
  return sys.flows();
}

KeplerState kepler_init(double e) {
  if (!(e >= 0.0 && e < 1.0)) throw Error("eccentricity must lie in [0, 1)");
  KeplerState s;
  s.q = {1.0 - e, 0.0};
  s.p = {0.0, std::sqrt((1.0 + e) / (1.0 - e))};
  s.mu = 1.0;
  return s;
}

double solve_kepler_equation(double mean_anomaly, double e) {
  double ecc = mean_anomaly + e * std::sin(mean_anomaly);
  for (int it = 0; it < 50; ++it) {
    const double delta = (ecc - e * std::sin(ecc) - mean_anomaly) / (1.0 - e * std::cos(ecc));
    ecc -= delta;
    if (std::abs(delta) <= 1e-14) return ecc;
  }
  throw Error("Kepler equation did not converge for M = " + std::to_string(mean_anomaly) +
              ", e = " + std::to_string(e));
}

KeplerState kepler_exact(double e, double t) {
  if (!(e >= 0.0 && e < 1.0)) throw Error("eccentricity must lie in [0, 1)");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double m = std::fmod(t, two_pi);
  if (m < 0.0) m += two_pi;
  const double ecc = solve_kepler_equation(m, e);
  const double c = std::cos(ecc);
  const double s = std::sin(ecc);
  const double root = std::sqrt(1.0 - e * e);
  KeplerState out;
  out.q = {c - e, root * s};
  out.p = Eigen::Vector2d(-s, root * c) / (1.0 - e * c);
  out.mu = 1.0;
  return out;
}

double kepler_energy(const KeplerState& s) {
  const double r = s.q.norm();
  if (r == 0.0) throw Error("Kepler energy undefined at r = 0");
  return 0.5 * s.p.squaredNorm() - s.mu / r;
}

double kepler_energy(const State& x, double mu) {
  return kepler_energy(KeplerState::from_state(x, mu));
}

FlowSet harmonic_flows() {
  RknSystem sys;
  sys.dimension = 1;
  sys.acceleration = [](const Eigen::VectorXd& y) -> Eigen::VectorXd { return -y; };
  return sys.flows();
}

State harmonic_exact(const State& x0, double t) {
  if (x0.size() != 2) throw Error("harmonic oscillator state must have 2 components");
  const double c = std::cos(t);
  const double s = std::sin(t);
  State out(2);
  out << x0(0) * c + x0(1) * s, -x0(0) * s + x0(1) * c;
  return out;
}

double harmonic_energy(const State& x) { return 0.5 * x.squaredNorm(); }

}  // namespace embedsplit
