#include "embedsplit/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "embedsplit/error.hpp"

namespace embedsplit {

void FlowSet::set(Role role, Flow flow, int cost) {
  if (cost < 0) throw Error("flow cost must be nonnegative");
  flows_[index(role)] = std::move(flow);
  costs_[index(role)] = cost;
}

State FlowSet::apply(Role role, double tau, const State& x) const {
  const auto& f = flows_[index(role)];
  if (!f) throw Error("flow set has no flow for role " + std::string(to_string(role)));
  if (tau == 0.0) return x;
  return f(tau, x);
}

long FlowSet::step_cost(const SchemeSpec& scheme) const {
  long total = 0;
  for (const Stage& s : scheme.stages) total += cost(s.role);
  return total;
}

StepResult step_with_stages(const SchemeSpec& scheme, const FlowSet& flows, const State& x,
                            double h) {
  if (x.size() != flows.dimension())
    throw Error("state has dimension " + std::to_string(x.size()) + ", flows expect " +
                std::to_string(flows.dimension()));
  StepResult out;
  const std::size_t n = scheme.stages.size();
  out.stages.reserve(n);
  out.stages.push_back(x);
  State cur = x;
  for (std::size_t k = 0; k < n; ++k) {
    const Stage& st = scheme.stages[k];
    cur = flows.apply(st.role, st.coeff * h, cur);
    if (st.coeff * h != 0.0) out.fevals += flows.cost(st.role);
    if (!cur.allFinite())
      throw IntegrationError("non-finite state after stage " + std::to_string(k + 1) + " (" +
                                 std::string(to_string(st.role)) + ")",
                             -1, static_cast<int>(k));
    if (k + 1 < n) out.stages.push_back(cur);
  }
  out.x_next = std::move(cur);
  return out;
}

State apply_estimator(std::span<const double> weights, const StepResult& result) {
  if (weights.size() != result.stages.size())
    throw Error("estimator has " + std::to_string(weights.size()) + " weights for " +
                std::to_string(result.stages.size()) + " stage outputs");
  State out = State::Zero(result.stages.front().size());
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (weights[k] != 0.0) out += weights[k] * result.stages[k];
  return out;
}

State apply_estimator(const EstimatorWeights& weights, const StepResult& result) {
  return apply_estimator(std::span<const double>(weights.w), result);
}

double combined_error(double err5, double err3) {
  if (err5 < 0.0 || err3 < 0.0) throw Error("error estimates must be nonnegative");
  if (err5 == 0.0) return 0.0;
  return err5 * (err5 / std::hypot(err5, 0.1 * err3));
}

ErrorNorm error_norm_from_string(std::string_view s) {
  if (s == "euclidean") return ErrorNorm::Euclidean;
  if (s == "max") return ErrorNorm::Max;
  if (s == "positions") return ErrorNorm::PositionsEuclidean;
  throw Error("unknown error norm '" + std::string(s) + "' (euclidean, max, positions)");
}

std::string_view to_string(ErrorNorm n) {
  switch (n) {
    case ErrorNorm::Euclidean: return "euclidean";
    case ErrorNorm::Max: return "max";
    case ErrorNorm::PositionsEuclidean: return "positions";
  }
  return "?";
}

double error_norm(const State& d, ErrorNorm norm) {
  switch (norm) {
    case ErrorNorm::Euclidean: return d.norm();
    case ErrorNorm::Max: return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
    case ErrorNorm::PositionsEuclidean: return d.head(d.size() / 2).norm();
  }
  return d.norm();
}

StepError step_error(const EmbeddedMethod& method, const StepResult& result, ErrorNorm norm) {
  StepError out;
  for (const auto& est : method.estimators)
    out.per_estimator.push_back(error_norm(apply_estimator(est, result) - result.x_next, norm));
  if (out.per_estimator.size() == 1) {
    out.err = out.per_estimator.front();
  } else if (out.per_estimator.size() >= 2) {
    out.err = combined_error(out.per_estimator.front(), out.per_estimator.back());
  }
  return out;
}

void ControllerConfig::validate() const {
  if (!(tol > 0.0)) throw Error("controller tol must be positive");
  if (!(fac > 0.0 && fac <= 1.0)) throw Error("controller fac must lie in (0, 1]");
  if (!(facmin > 0.0 && facmin < 1.0)) throw Error("controller facmin must lie in (0, 1)");
  if (!(facmax > 1.0)) throw Error("controller facmax must exceed 1");
  if (!(h_init > 0.0)) throw Error("controller h_init must be positive");
  if (max_rejects < 0) throw Error("controller max_rejects must be nonnegative");
  if (exponent_order && *exponent_order < 0) throw Error("controller exponent order must be >= 0");
}

int controller_order(const EmbeddedMethod& method, const ControllerConfig& cfg) {
  if (cfg.exponent_order) return *cfg.exponent_order;
  return method.dual() ? method.main_order - 1 : method.estimator_order();
}

double propose_step(double h, double err, int order, const ControllerConfig& cfg) {
  if (err == 0.0) return h * cfg.facmax;
  const double f = cfg.fac * std::pow(cfg.tol / err, 1.0 / (order + 1));
  return h * std::clamp(f, cfg.facmin, cfg.facmax);
}

CsvTrajectorySink::CsvTrajectorySink(std::ostream& out) : out_(out) {}

void CsvTrajectorySink::record(double t, const State& x, double err, double h) {
  if (!header_written_) {
    out_ << "t,h,err";
    for (Eigen::Index i = 0; i < x.size(); ++i) out_ << ",x" << i;
    out_ << '\n';
    header_written_ = true;
  }
  const auto old = out_.precision(17);
  out_ << t << ',' << h << ',' << err;
  for (Eigen::Index i = 0; i < x.size(); ++i) out_ << ',' << x(i);
  out_ << '\n';
  out_.precision(old);
}

namespace {

void push_point(Trajectory& tr, double t, const State& x, double h, const StepError& e,
                std::size_t nest, bool store) {
  tr.t.push_back(t);
  if (store) tr.x.push_back(x);
  tr.h.push_back(h);
  tr.err.push_back(e.err);
  if (tr.estimator_err.size() < nest) tr.estimator_err.resize(nest);
  for (std::size_t k = 0; k < nest; ++k)
    tr.estimator_err[k].push_back(k < e.per_estimator.size() ? e.per_estimator[k] : 0.0);
}

StepResult guarded_step(const EmbeddedMethod& method, const FlowSet& flows, const State& x,
                        double h, long step) {
  try {
    return step_with_stages(method.scheme, flows, x, h);
  } catch (const IntegrationError& e) {
    throw IntegrationError(std::string(e.what()) + " in step " + std::to_string(step), step,
                           e.stage());
  } catch (const Error& e) {
    throw IntegrationError(std::string(e.what()) + " in step " + std::to_string(step), step, -1);
  }
}

}  // namespace

IntegrationResult integrate_fixed(const EmbeddedMethod& method, const FlowSet& flows,
                                  const State& x0, double h, double t0, double t_end,
                                  const FixedOptions& opts) {
  const double span = t_end - t0;
  if (h == 0.0 || !std::isfinite(h)) throw Error("step size must be finite and nonzero");
  if (span != 0.0 && (span > 0) != (h > 0)) throw Error("step size points away from t_end");

  const double ratio = span / h;
  long nfull = std::lround(ratio);
  bool partial = false;
  if (std::abs(ratio - static_cast<double>(nfull)) > 1e-12 * std::max(1.0, ratio)) {
    nfull = static_cast<long>(std::floor(ratio));
    partial = true;
  }

  IntegrationResult res;
  res.stats.partial_final_step = partial;
  const std::size_t nest = method.estimators.size();
  push_point(res.trajectory, t0, x0, 0.0, StepError{std::vector<double>(nest, 0.0), 0.0}, nest,
             opts.store_states);

  State x = x0;
  const long total = nfull + (partial ? 1 : 0);
  for (long n = 0; n < total; ++n) {
    const bool last_partial = partial && n == nfull;
    const double t_prev = t0 + static_cast<double>(n) * h;
    const double step = last_partial ? t_end - t_prev : h;
    const double t_next = last_partial ? t_end : t0 + static_cast<double>(n + 1) * h;
    StepResult r = guarded_step(method, flows, x, step, n);
    StepError e = step_error(method, r, opts.error_norm);
    x = std::move(r.x_next);
    res.stats.fevals += r.fevals;
    res.stats.accepted += 1;
    res.stats.max_err = std::max(res.stats.max_err, e.err);
    push_point(res.trajectory, t_next, x, step, e, nest, opts.store_states);
    if (opts.sink) opts.sink->record(t_next, x, e.err, step);
  }
  if (!opts.store_states) res.trajectory.x.push_back(x);
  return res;
}

IntegrationResult integrate_adaptive(const EmbeddedMethod& method, const FlowSet& flows,
                                     const State& x0, double t0, double t_end,
                                     const ControllerConfig& cfg, TrajectorySink* sink) {
  cfg.validate();
  if (method.estimators.empty())
    throw Error("method " + method.name + " has no estimator; adaptive stepping impossible");
  if (!(t_end > t0)) throw Error("adaptive integration needs t_end > t0");
  const int order = controller_order(method, cfg);
  const std::size_t nest = method.estimators.size();

  IntegrationResult res;
  push_point(res.trajectory, t0, x0, 0.0, StepError{std::vector<double>(nest, 0.0), 0.0}, nest,
             true);

  State x = x0;
  double t = t0;
  double h = cfg.h_init;
  long step = 0;
  while (t < t_end) {
    int rejects = 0;
    for (;;) {
      const double remaining = t_end - t;
      const bool last = h >= remaining;
      const double h_try = last ? remaining : h;
      if (t + h_try == t)
        throw IntegrationError("step size underflow at t = " + std::to_string(t), step, -1);

      StepResult r = guarded_step(method, flows, x, h_try, step);
      res.stats.fevals += r.fevals;
      StepError e = step_error(method, r, cfg.error_norm);
      if (e.err <= cfg.tol) {
        t = last ? t_end : t + h_try;
        x = std::move(r.x_next);
        res.stats.accepted += 1;
        res.stats.max_err = std::max(res.stats.max_err, e.err);
        push_point(res.trajectory, t, x, h_try, e, nest, true);
        if (sink) sink->record(t, x, e.err, h_try);
        h = propose_step(h_try, e.err, order, cfg);
        break;
      }
      res.stats.rejected += 1;
      if (++rejects > cfg.max_rejects)
        throw IntegrationError("step rejected " + std::to_string(rejects) + " times at t = " +
                                   std::to_string(t),
                               step, -1);
      h = propose_step(h_try, std::isfinite(e.err) ? e.err : HUGE_VAL, order, cfg);
    }
    ++step;
  }
  return res;
}

}  // namespace embedsplit
