#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "embedsplit/bench.hpp"
#include "embedsplit/error.hpp"
#include "embedsplit/estgen.hpp"
#include "embedsplit/problems.hpp"
#include "embedsplit/scheme_io.hpp"
#include "embedsplit/schemes.hpp"
#include "json.hpp"

using namespace embedsplit;
namespace fs = std::filesystem;

namespace {

std::string g(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Pin parse_pin(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw Error("pin '" + s + "' is not of the form k=v");
  try {
    return {std::stoi(s.substr(0, eq)), std::stod(s.substr(eq + 1))};
  } catch (const std::exception&) {
    throw Error("pin '" + s + "' is not of the form k=v");
  }
}

// A catalog name, or a path to a scheme file with tabulated weights.
EmbeddedMethod resolve_method(const std::string& ref) {
  for (const auto& m : catalog())
    if (m.name == ref) return m;
  if (!fs::exists(ref)) return find_method(ref);  // throws with the known names
  const SchemeFile f = load_scheme_file(ref);
  EmbeddedMethod m;
  m.name = f.name.empty() ? fs::path(ref).stem().string() : f.name;
  m.scheme = f.scheme;
  m.main_order = f.scheme.declared_order;
  for (const auto& e : f.estimators) {
    EstimatorWeights w;
    if (e.weights) {
      w.w = *e.weights;
    } else {
      w = solve_weights(assemble_system(f.scheme, e.recipe.order), e.recipe.symmetry, e.recipe.pins);
      if (!w.feasible) throw Error("estimator of order " + std::to_string(e.recipe.order) + " is infeasible");
    }
    w.order = e.recipe.order;
    m.estimators.push_back(std::move(w));
    m.recipes.push_back(e.recipe);
  }
  return m;
}

void print_grades(const std::string& label, const GradeReport& g6, int claimed) {
  std::cout << label << ": order " << g6.order << (g6.saturated() ? "+" : "");
  if (claimed > 0) std::cout << " (claimed " << claimed << (g6.order == claimed ? ", ok" : ", MISMATCH") << ")";
  std::cout << "\n  residual by grade:";
  for (std::size_t k = 1; k < g6.residuals.size(); ++k) std::cout << ' ' << k << ':' << g(g6.residuals[k], 3);
  std::cout << '\n';
}

int cmd_derive(const std::string& file, int order, const std::vector<std::string>& pins_in,
               bool no_symmetry, bool as_json) {
  const SchemeFile f = load_scheme_file(file);
  std::vector<SignedPair> symmetry;
  std::vector<Pin> pins;
  for (const auto& e : f.estimators)
    if (e.recipe.order == order) {
      if (!no_symmetry) symmetry = e.recipe.symmetry;
      pins = e.recipe.pins;
      break;
    }
  for (const auto& s : pins_in) {
    const Pin p = parse_pin(s);
    std::erase_if(pins, [&](const Pin& q) { return q.index == p.index; });
    pins.push_back(p);
  }
  const WeightSystem sys = assemble_system(f.scheme, order);
  const EstimatorWeights w = solve_weights(sys, symmetry, pins);
  const int probe = std::min(kMaxGrade, std::max(order, f.scheme.declared_order) + 1);
  const OrderReport rep = verify_order(f.scheme, &w, probe);

  if (as_json) {
    nlohmann::json j = {{"order", order},
                        {"conditions", count_conditions(f.scheme.family, order)},
                        {"weights", w.w},
                        {"residual", w.residual},
                        {"nullspace_dim", w.nullspace_dim},
                        {"feasible", w.feasible},
                        {"verified_order", rep.estimator->order}};
    std::cout << j.dump(2) << '\n';
    return w.feasible ? 0 : 2;
  }
  std::cout << (f.name.empty() ? file : f.name) << ": " << f.scheme.stages.size() << " stages, "
            << to_string(f.scheme.family) << ", " << count_conditions(f.scheme.family, order)
            << " conditions beyond the trivial one at order " << order << '\n';
  std::cout << "feasible: " << (w.feasible ? "yes" : "no") << ", residual " << g(w.residual, 3)
            << ", free directions " << w.nullspace_dim << '\n';
  for (std::size_t k = 0; k < w.w.size(); ++k) std::printf("  w%-3zu % .20g\n", k, w.w[k]);
  print_grades("estimator", *rep.estimator, order);
  return w.feasible ? 0 : 2;
}

int cmd_verify(const std::string& ref) {
  const EmbeddedMethod m = resolve_method(ref);
  int probe = m.main_order;
  for (const auto& e : m.estimators) probe = std::max(probe, e.order);
  probe = std::min(kMaxGrade, probe + 1);
  bool ok = true;
  const OrderReport base = verify_order(m.scheme, nullptr, probe);
  std::cout << m.name << '\n';
  print_grades("method", base.method, m.main_order);
  ok = ok && base.method.order == m.main_order;
  for (std::size_t k = 0; k < m.estimators.size(); ++k) {
    const OrderReport rep = verify_order(m.scheme, &m.estimators[k], probe);
    print_grades("estimator " + std::to_string(k), *rep.estimator, m.estimators[k].order);
    ok = ok && rep.estimator->order == m.estimators[k].order;
  }
  return ok ? 0 : 2;
}

std::vector<double> parse_h(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) {
    if (s.find(':') != std::string::npos) {
      // hmax:hmin:n
      double a, b;
      int n;
      if (std::sscanf(s.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3)
        throw Error("step range '" + s + "' is not hmax:hmin:n");
      const auto r = geometric_steps(a, b, n);
      out.insert(out.end(), r.begin(), r.end());
    } else {
      out.push_back(std::stod(s));
    }
  }
  return out;
}

int cmd_scan(ScanConfig cfg, const std::vector<std::string>& h_items, const std::string& out) {
  cfg.steps = parse_h(h_items);
  const auto recs = run_scan(cfg);
  if (out.empty() || out == "-") {
    write_csv(std::cout, recs);
  } else {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    write_csv(f, recs);
    long failed = 0;
    for (const auto& r : recs) failed += r.ok ? 0 : 1;
    std::cerr << recs.size() << " runs written to " << out;
    if (failed) std::cerr << " (" << failed << " failed)";
    std::cerr << '\n';
  }
  for (const auto& r : recs)
    if (!r.ok) std::cerr << r.method << " e=" << r.e << " h=" << r.h << ": " << r.error << '\n';
  return 0;
}

int cmd_adaptive(const std::string& ref, std::vector<double> tols, double e, double t_end,
                 ControllerConfig cfg, const std::string& out, const std::string& trajectory) {
  const EmbeddedMethod m = resolve_method(ref);
  if (!trajectory.empty()) {
    if (tols.size() != 1) throw Error("--trajectory needs exactly one --tol");
    std::ofstream f(trajectory);
    if (!f) throw Error("cannot write " + trajectory);
    CsvTrajectorySink sink(f);
    cfg.tol = tols.front();
    integrate_adaptive(m, kepler_flows(), kepler_init(e).to_state(), 0.0, t_end, cfg, &sink);
  }
  const auto recs = run_adaptive_sweep(m, e, tols, t_end, cfg);
  if (out.empty() || out == "-") {
    write_adaptive_csv(std::cout, recs);
  } else {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    write_adaptive_csv(f, recs);
  }
  int aborted = 0;
  for (const auto& r : recs)
    if (r.aborted) {
      std::cerr << "tol " << r.tol << ": " << r.error << '\n';
      ++aborted;
    }
  return aborted ? 3 : 0;
}

int cmd_order_fit(const std::string& file, double lo, double hi, int tail) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file);
  const auto recs = read_csv(in);
  std::map<std::pair<std::string, double>, std::vector<RunRecord>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : recs) {
    auto key = std::make_pair(r.method, r.e);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(r);
  }
  int bad = 0;
  std::cout << "method,e,slope,intercept,residual,points\n";
  for (const auto& key : order) {
    try {
      const OrderFit f = fit_order(groups[key], lo, hi, tail);
      std::cout << key.first << ',' << g(key.second) << ',' << g(f.slope, 4) << ','
                << g(f.intercept, 4) << ',' << g(f.residual, 3) << ',' << f.points << '\n';
    } catch (const Error& ex) {
      std::cout << key.first << ',' << g(key.second) << ",,,,0\n";
      std::cerr << key.first << " e=" << key.second << ": " << ex.what() << '\n';
      ++bad;
    }
  }
  return bad ? 2 : 0;
}

int cmd_list() {
  const FlowSet flows = kepler_flows();
  std::printf("%-14s %-14s %6s %9s  %-8s %s\n", "method", "family", "stages", "kicks", "order",
              "estimators");
  for (const auto& m : catalog()) {
    std::string est;
    for (const auto& e : m.estimators) est += (est.empty() ? "" : ",") + std::to_string(e.order);
    std::printf("%-14s %-14s %6zu %9ld  %-8d %s\n", m.name.c_str(),
                std::string(to_string(m.scheme.family)).c_str(), m.scheme.stages.size(),
                flows.step_cost(m.scheme), m.main_order, est.c_str());
  }
  return 0;
}

int cmd_export(const std::vector<std::string>& names, const std::string& dir) {
  std::vector<std::string> list = names.empty() ? method_names() : names;
  for (const auto& n : list) {
    const std::string text = dump_scheme_file(scheme_file_from_method(find_method(n)));
    if (dir.empty()) {
      std::cout << text;
      continue;
    }
    fs::create_directories(dir);
    std::string file = n;
    for (char& c : file)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '_';
    const fs::path path = fs::path(dir) / (file + ".json");
    std::ofstream(path) << text;
    std::cerr << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composition and splitting integrators with embedded error estimators"};
  app.require_subcommand(1);

  auto* derive = app.add_subcommand("derive", "solve estimator weights for a scheme file");
  std::string scheme_file;
  int order = 3;
  std::vector<std::string> pins;
  bool no_symmetry = false, as_json = false;
  derive->add_option("scheme-file", scheme_file, "JSON scheme file")->required()->check(CLI::ExistingFile);
  derive->add_option("--order,-l", order, "estimator order")->required()->check(CLI::Range(1, kMaxGrade));
  derive->add_option("--pin", pins, "fix weight k to v, as k=v (repeatable)");
  derive->add_flag("--no-symmetry", no_symmetry, "ignore sign pairs stored in the file");
  derive->add_flag("--json", as_json, "print the result as JSON");

  auto* verify = app.add_subcommand("verify", "report method and estimator orders");
  std::string method_ref;
  verify->add_option("method", method_ref, "catalog name or scheme file")->required();

  auto* scan = app.add_subcommand("scan", "fixed-step Kepler scan, CSV output");
  scan->set_help_flag("--help", "print this help message and exit");  // --h is the step list
  ScanConfig scfg;
  std::vector<std::string> h_items;
  std::string scan_out, scan_norm = "euclidean";
  scan->add_option("--methods", scfg.methods, "catalog method names")->required();
  scan->add_option("--e", scfg.eccentricities, "eccentricities")->capture_default_str();
  scan->add_option("--h", h_items, "step sizes, or hmax:hmin:n for a geometric range")->required();
  scan->add_option("--tend", scfg.t_end, "final time")->capture_default_str();
  scan->add_option("--out", scan_out, "CSV path (stdout if omitted)");
  scan->add_option("--threads", scfg.threads, "worker threads, 0 for all cores")->capture_default_str();
  scan->add_option("--norm", scan_norm, "estimator norm: euclidean, max, positions")->capture_default_str();

  auto* adaptive = app.add_subcommand("adaptive", "adaptive Kepler runs over a tolerance list");
  std::string ad_method, ad_out, ad_traj, ad_norm = "euclidean";
  std::vector<double> tols;
  double ad_e = 0.4, ad_tend = 20.0;
  int ad_exp = -1;
  ControllerConfig ccfg;
  adaptive->add_option("--method", ad_method, "catalog name or scheme file")->required();
  adaptive->add_option("--tol", tols, "tolerances")->required();
  adaptive->add_option("--e", ad_e, "eccentricity")->capture_default_str();
  adaptive->add_option("--tend", ad_tend, "final time")->capture_default_str();
  adaptive->add_option("--h0", ccfg.h_init, "initial step")->capture_default_str();
  adaptive->add_option("--fac", ccfg.fac, "safety factor")->capture_default_str();
  adaptive->add_option("--facmin", ccfg.facmin, "smallest step ratio")->capture_default_str();
  adaptive->add_option("--facmax", ccfg.facmax, "largest step ratio")->capture_default_str();
  adaptive->add_option("--max-rejects", ccfg.max_rejects, "rejections per step before aborting")->capture_default_str();
  adaptive->add_option("--exponent-order", ad_exp, "override l in the exponent 1/(l+1)");
  adaptive->add_option("--norm", ad_norm, "error norm: euclidean, max, positions")->capture_default_str();
  adaptive->add_option("--out", ad_out, "CSV path (stdout if omitted)");
  adaptive->add_option("--trajectory", ad_traj, "write the accepted steps of a single-tol run");

  auto* fit = app.add_subcommand("order-fit", "fit log E1 against log h per method and e");
  std::string fit_file;
  double fit_lo = 1e-10, fit_hi = 1e-3;
  int fit_tail = 0;
  fit->add_option("file", fit_file, "scan CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--lo", fit_lo, "lower end of the E1 window")->capture_default_str();
  fit->add_option("--hi", fit_hi, "upper end of the E1 window")->capture_default_str();
  fit->add_option("--tail", fit_tail, "use only the n smallest steps in the window (0: all)");

  auto* list = app.add_subcommand("list-methods", "catalog methods with their cost per step");

  auto* exp = app.add_subcommand("export", "write catalog methods as scheme files");
  std::vector<std::string> exp_names;
  std::string exp_dir;
  exp->add_option("methods", exp_names, "method names (all if omitted)");
  exp->add_option("--dir", exp_dir, "output directory (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*derive) return cmd_derive(scheme_file, order, pins, no_symmetry, as_json);
    if (*verify) return cmd_verify(method_ref);
    if (*scan) {
      scfg.estimator_norm = error_norm_from_string(scan_norm);
      return cmd_scan(scfg, h_items, scan_out);
    }
    if (*adaptive) {
      ccfg.error_norm = error_norm_from_string(ad_norm);
      if (ad_exp >= 0) ccfg.exponent_order = ad_exp;
      return cmd_adaptive(ad_method, tols, ad_e, ad_tend, ccfg, ad_out, ad_traj);
    }
    if (*fit) return cmd_order_fit(fit_file, fit_lo, fit_hi, fit_tail);
    if (*list) return cmd_list();
    if (*exp) return cmd_export(exp_names, exp_dir);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
