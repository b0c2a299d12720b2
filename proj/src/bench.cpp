#include "embedsplit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "embedsplit/error.hpp"
#include "embedsplit/problems.hpp"

namespace embedsplit {

void ScanConfig::validate() const {
  if (methods.empty()) throw Error("scan needs at least one method");
  if (eccentricities.empty()) throw Error("scan needs at least one eccentricity");
  if (steps.empty()) throw Error("scan needs at least one step size");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error("scan t_end must be positive");
  for (const auto& m : methods) find_method(m);
  for (double e : eccentricities)
    if (!(e >= 0.0 && e < 1.0)) throw Error("eccentricity " + std::to_string(e) + " outside [0, 1)");
  for (double h : steps) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error("step sizes must be positive");
    if (h > t_end)
      throw Error("step size " + std::to_string(h) + " exceeds t_end; no full step fits");
  }
}

std::vector<double> geometric_steps(double h_max, double h_min, int n) {
  if (!(h_max > 0.0 && h_min > 0.0)) throw Error("geometric steps need positive bounds");
  if (n < 1) throw Error("geometric steps need n >= 1");
  if (n == 1) return {h_max};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double r = std::log(h_min / h_max) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = h_max * std::exp(r * i);
  out.back() = h_min;
  return out;
}

namespace {

// Compares each accepted state with the exact orbit as it is produced.
class KeplerErrorSink : public TrajectorySink {
 public:
  KeplerErrorSink(double e, double h0) : e_(e), h0_(h0) {}

  void record(double t, const State& x, double, double h) override {
    const State ex = kepler_exact(e_, t).to_state();
    const State d = ex - x;
    full_ = std::max(full_, d.norm());
    pos_ = std::max(pos_, d.head(2).norm());
    drift_ = std::max(drift_, std::abs(kepler_energy(x) - h0_));
    steps_.push_back(h);
  }

  double full_ = 0.0;
  double pos_ = 0.0;
  double drift_ = 0.0;
  std::vector<double> steps_;

 private:
  double e_;
  double h0_;
};

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

RunRecord run_single(const EmbeddedMethod& method, double e, double h, double t_end,
                     ErrorNorm estimator_norm) {
  RunRecord rec;
  rec.method = method.name;
  rec.e = e;
  rec.h = h;
  const FlowSet flows = kepler_flows();
  const KeplerState init = kepler_init(e);
  KeplerErrorSink sink(e, kepler_energy(init));
  FixedOptions opts;
  opts.error_norm = estimator_norm;
  opts.sink = &sink;
  opts.store_states = false;
  try {
    const IntegrationResult res = integrate_fixed(method, flows, init.to_state(), h, 0.0, t_end, opts);
    rec.nsteps = res.stats.accepted;
    rec.fevals = res.stats.fevals;
    rec.E1_full = sink.full_;
    rec.E1_pos = sink.pos_;
    rec.energy_drift = sink.drift_;
    rec.E2 = max_of(res.trajectory.err);
    if (method.dual()) rec.E2_low = max_of(res.trajectory.estimator_err.back());
  } catch (const Error& ex) {
    rec.ok = false;
    rec.error = ex.what();
  }
  return rec;
}

std::vector<RunRecord> run_scan(const ScanConfig& cfg) {
  cfg.validate();
  struct Job {
    const EmbeddedMethod* method;
    double e;
    double h;
  };
  std::vector<Job> jobs;
  for (const auto& m : cfg.methods) {
    const EmbeddedMethod& method = find_method(m);
    for (double e : cfg.eccentricities)
      for (double h : cfg.steps) jobs.push_back({&method, e, h});
  }

  std::vector<RunRecord> out(jobs.size());
  unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();)
      out[i] = run_single(*jobs[i].method, jobs[i].e, jobs[i].h, cfg.t_end, cfg.estimator_norm);
  };
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(work);
  }
  return out;
}

namespace {

constexpr const char* kHeader = "method,e,h,nsteps,fevals,E1_full,E1_pos,E2,E2_low,energy_drift";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what, long line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("csv line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  const auto old = out.precision(17);
  out << kHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.e << ',' << r.h << ',';
    if (!r.ok) {
      out << ",,,,,,\n";
      continue;
    }
    out << r.nsteps << ',' << r.fevals << ',' << r.E1_full << ',' << r.E1_pos << ',' << r.E2 << ',';
    if (r.E2_low) out << *r.E2_low;
    out << ',' << r.energy_drift << '\n';
  }
  out.precision(old);
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  long lineno = 1;
  if (!std::getline(in, line)) throw Error("csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw Error("csv header mismatch: expected '" + std::string(kHeader) + "'");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 10)
      throw Error("csv line " + std::to_string(lineno) + ": expected 10 fields, got " +
                  std::to_string(f.size()));
    RunRecord r;
    r.method = f[0];
    r.e = parse_double(f[1], "e", lineno);
    r.h = parse_double(f[2], "h", lineno);
    if (f[3].empty()) {
      r.ok = false;
      out.push_back(std::move(r));
      continue;
    }
    r.nsteps = static_cast<long>(parse_double(f[3], "nsteps", lineno));
    r.fevals = static_cast<long>(parse_double(f[4], "fevals", lineno));
    r.E1_full = parse_double(f[5], "E1_full", lineno);
    r.E1_pos = parse_double(f[6], "E1_pos", lineno);
    r.E2 = parse_double(f[7], "E2", lineno);
    if (!f[8].empty()) r.E2_low = parse_double(f[8], "E2_low", lineno);
    r.energy_drift = parse_double(f[9], "energy_drift", lineno);
    out.push_back(std::move(r));
  }
  return out;
}

OrderFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double lo,
                    double hi, int tail) {
  if (x.size() != y.size()) throw Error("fit needs x and y of equal length");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] >= lo && y[i] <= hi) pts.emplace_back(x[i], y[i]);
  std::sort(pts.begin(), pts.end());
  if (tail > 0 && pts.size() > static_cast<std::size_t>(tail)) pts.resize(static_cast<std::size_t>(tail));
  std::vector<double> lx, ly;
  for (auto [px, py] : pts) {
    lx.push_back(std::log10(px));
    ly.push_back(std::log10(py));
  }
  if (lx.size() < 3)
    throw Error("only " + std::to_string(lx.size()) + " points with values in [" + sci(lo) + ", " +
                sci(hi) + "]; need 3");
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw Error("fit needs at least two distinct x values");
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = static_cast<int>(lx.size());
  return fit;
}

OrderFit fit_order(const std::vector<RunRecord>& records, double lo, double hi, int tail) {
  std::vector<double> h, err;
  for (const auto& r : records) {
    if (!records.empty() && (r.method != records.front().method || r.e != records.front().e))
      throw Error("fit_order needs records of a single method and eccentricity");
    if (!r.ok) continue;
    h.push_back(r.h);
    err.push_back(r.E1_full);
  }
  return fit_loglog(h, err, lo, hi, tail);
}

AdaptiveRecord run_adaptive(const EmbeddedMethod& method, double e, double tol, double t_end,
                            ControllerConfig cfg) {
  AdaptiveRecord rec;
  rec.method = method.name;
  rec.e = e;
  rec.tol = tol;
  cfg.tol = tol;
  const KeplerState init = kepler_init(e);
  KeplerErrorSink sink(e, kepler_energy(init));
  try {
    const IntegrationResult res =
        integrate_adaptive(method, kepler_flows(), init.to_state(), 0.0, t_end, cfg, &sink);
    rec.accepted = res.stats.accepted;
    rec.rejected = res.stats.rejected;
    rec.fevals = res.stats.fevals;
  } catch (const IntegrationError& ex) {
    rec.aborted = true;
    rec.error = ex.what();
  }
  rec.achieved = sink.full_;

  // drop the clipped final step and the startup ramp (growth clamped at facmax)
  std::vector<double> hs = sink.steps_;
  if (hs.size() > 1) hs.pop_back();
  std::size_t start = 1;
  while (start < hs.size() && hs[start] >= hs[start - 1] * cfg.facmax * (1 - 1e-9)) ++start;
  if (start < hs.size()) hs.erase(hs.begin(), hs.begin() + static_cast<long>(start));
  if (!hs.empty()) {
    rec.h_min = *std::min_element(hs.begin(), hs.end());
    rec.h_max = *std::max_element(hs.begin(), hs.end());
    double sum = 0, sq = 0;
    for (double v : hs) sum += v;
    rec.h_mean = sum / static_cast<double>(hs.size());
    for (double v : hs) sq += (v - rec.h_mean) * (v - rec.h_mean);
    rec.h_cv = std::sqrt(sq / static_cast<double>(hs.size())) / rec.h_mean;
  }
  return rec;
}

std::vector<AdaptiveRecord> run_adaptive_sweep(const EmbeddedMethod& method, double e,
                                               const std::vector<double>& tols, double t_end,
                                               ControllerConfig cfg) {
  if (method.estimators.empty()) throw Error("method " + method.name + " has no estimator");
  if (tols.empty()) throw Error("adaptive sweep needs at least one tolerance");
  std::vector<AdaptiveRecord> out;
  for (double tol : tols) out.push_back(run_adaptive(method, e, tol, t_end, cfg));
  return out;
}

void write_adaptive_csv(std::ostream& out, const std::vector<AdaptiveRecord>& records) {
  const auto old = out.precision(17);
  out << "method,e,tol,achieved,accepted,rejected,fevals,h_min,h_mean,h_max,h_cv,aborted\n";
  for (const auto& r : records)
    out << r.method << ',' << r.e << ',' << r.tol << ',' << r.achieved << ',' << r.accepted << ','
        << r.rejected << ',' << r.fevals << ',' << r.h_min << ',' << r.h_mean << ',' << r.h_max
        << ',' << r.h_cv << ',' << (r.aborted ? 1 : 0) << '\n';
  out.precision(old);
}

}  // namespace embedsplit
