#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "embedsplit/bench.hpp"
#include "embedsplit/error.hpp"
#include "embedsplit/estgen.hpp"
#include "embedsplit/problems.hpp"
#include "embedsplit/scheme_io.hpp"
#include "embedsplit/schemes.hpp"
#include "embedsplit/stepper.hpp"

namespace py = pybind11;
using namespace embedsplit;
using namespace pybind11::literals;

namespace {

std::vector<SignedPair> to_pairs(const std::vector<std::tuple<int, int, int>>& t) {
  std::vector<SignedPair> out;
  for (auto [i, j, s] : t) out.push_back({i, j, s});
  return out;
}

std::vector<Pin> to_pins(const std::map<int, double>& m) {
  std::vector<Pin> out;
  for (auto [k, v] : m) out.push_back({k, v});
  return out;
}

py::dict grade_dict(const GradeReport& g) {
  return py::dict("residuals"_a = g.residuals, "order"_a = g.order, "saturated"_a = g.saturated());
}

py::dict result_dict(const IntegrationResult& r) {
  py::dict d;
  d["t"] = r.trajectory.t;
  d["x"] = r.trajectory.x;
  d["h"] = r.trajectory.h;
  d["err"] = r.trajectory.err;
  d["estimator_err"] = r.trajectory.estimator_err;
  d["accepted"] = r.stats.accepted;
  d["rejected"] = r.stats.rejected;
  d["fevals"] = r.stats.fevals;
  d["partial_final_step"] = r.stats.partial_final_step;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Composition and splitting integrators with embedded error estimators";

  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::enum_<Family>(m, "Family")
      .value("SS", Family::SS)
      .value("MethodAdjoint", Family::MethodAdjoint)
      .value("Splitting", Family::Splitting);
  py::enum_<Role>(m, "Role")
      .value("S2", Role::S2)
      .value("BasicChi", Role::BasicChi)
      .value("AdjointChi", Role::AdjointChi)
      .value("FlowA", Role::FlowA)
      .value("FlowB", Role::FlowB);
  py::enum_<ErrorNorm>(m, "ErrorNorm")
      .value("Euclidean", ErrorNorm::Euclidean)
      .value("Max", ErrorNorm::Max)
      .value("Positions", ErrorNorm::PositionsEuclidean);

  py::class_<Stage>(m, "Stage")
      .def(py::init<Role, double>(), "role"_a, "coeff"_a)
      .def_readwrite("role", &Stage::role)
      .def_readwrite("coeff", &Stage::coeff)
      .def("__repr__", [](const Stage& s) {
        return "Stage(" + std::string(to_string(s.role)) + ", " + std::to_string(s.coeff) + ")";
      });

  py::class_<SchemeSpec>(m, "SchemeSpec")
      .def(py::init([](Family f, std::vector<Stage> stages, int order) {
             SchemeSpec s{f, std::move(stages), order};
             s.validate();
             return s;
           }),
           "family"_a, "stages"_a, "declared_order"_a)
      .def_readonly("family", &SchemeSpec::family)
      .def_readonly("stages", &SchemeSpec::stages)
      .def_readonly("declared_order", &SchemeSpec::declared_order)
      .def_property_readonly("output_count", &SchemeSpec::output_count)
      .def("coefficients", &SchemeSpec::coefficients);

  py::class_<EstimatorWeights>(m, "EstimatorWeights")
      .def_readonly("w", &EstimatorWeights::w)
      .def_readonly("order", &EstimatorWeights::order)
      .def_readonly("residual", &EstimatorWeights::residual)
      .def_readonly("nullspace_dim", &EstimatorWeights::nullspace_dim)
      .def_readonly("feasible", &EstimatorWeights::feasible);

  py::class_<WeightSystem>(m, "WeightSystem")
      .def_readonly("order", &WeightSystem::order)
      .def_readonly("matrix", &WeightSystem::matrix)
      .def_readonly("rhs", &WeightSystem::rhs)
      .def_property_readonly("rows", [](const WeightSystem& s) {
        std::vector<std::string> out;
        for (const auto& w : s.rows) out.push_back(w.str());
        return out;
      });

  py::class_<EmbeddedMethod>(m, "EmbeddedMethod")
      .def_readonly("name", &EmbeddedMethod::name)
      .def_readonly("scheme", &EmbeddedMethod::scheme)
      .def_readonly("main_order", &EmbeddedMethod::main_order)
      .def_readonly("estimators", &EmbeddedMethod::estimators)
      .def_readonly("notes", &EmbeddedMethod::notes)
      .def_property_readonly("dual", &EmbeddedMethod::dual)
      .def("__repr__", [](const EmbeddedMethod& e) { return "<EmbeddedMethod " + e.name + ">"; });

  m.def("count_conditions", &count_conditions, "family"_a, "order"_a);
  m.def("assemble_system", &assemble_system, "scheme"_a, "order"_a);
  m.def(
      "solve_weights",
      [](const WeightSystem& sys, const std::vector<std::tuple<int, int, int>>& symmetry,
         const std::map<int, double>& pins) {
        return solve_weights(sys, to_pairs(symmetry), to_pins(pins));
      },
      "system"_a, "symmetry"_a = std::vector<std::tuple<int, int, int>>{},
      "pins"_a = std::map<int, double>{},
      "Minimal-norm weights; symmetry holds (i, j, sign) triples, pins maps index to value.");
  m.def(
      "verify_order",
      [](const SchemeSpec& s, const std::optional<std::vector<double>>& w, int order, double tol) {
        EstimatorWeights e;
        if (w) e.w = *w;
        auto rep = verify_order(s, w ? &e : nullptr, order, tol);
        py::dict d("method"_a = grade_dict(rep.method));
        d["estimator"] = rep.estimator ? py::object(grade_dict(*rep.estimator)) : py::none();
        return d;
      },
      "scheme"_a, "weights"_a = py::none(), "order"_a, "tol"_a = kOrderTolerance);
  m.def("mirror_pairs", [](std::size_t k, int sign) {
    std::vector<std::tuple<int, int, int>> out;
    for (auto p : mirror_pairs(k, sign)) out.emplace_back(p.i, p.j, p.sign);
    return out;
  });

  m.def("method_names", &method_names);
  m.def("find_method", &find_method, "name"_a, py::return_value_policy::copy);

  m.def("ss_scheme", [](const std::vector<double>& a, int order) { return ss_scheme(a, order); });
  m.def("methodadjoint_scheme",
        [](const std::vector<double>& a, int order) { return methodadjoint_scheme(a, order); });
  m.def("splitting_scheme",
        [](const std::vector<double>& a, const std::vector<double>& b, int order) {
          return splitting_scheme({a, b, Role::FlowB}, order);
        },
        "a"_a, "b"_a, "order"_a);
  m.def("splitting_from_methodadjoint", [](const std::vector<double>& alphas) {
    auto c = splitting_from_methodadjoint(alphas);
    return py::make_tuple(c.a, c.b);
  });
  m.def("methodadjoint_from_splitting",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return methodadjoint_from_splitting(a, b);
        });

  m.def("parse_scheme_file", [](const std::string& text) {
    auto f = parse_scheme_file(text);
    return py::make_tuple(f.name, f.scheme);
  });
  m.def("dump_method", [](const std::string& name) {
    return dump_scheme_file(scheme_file_from_method(find_method(name)));
  });

  m.def("combined_error", &combined_error, "err5"_a, "err3"_a);

  py::class_<FlowSet>(m, "FlowSet")
      .def_property_readonly("dimension", &FlowSet::dimension)
      .def("apply", &FlowSet::apply, "role"_a, "tau"_a, "x"_a)
      .def("step_cost", &FlowSet::step_cost);
  m.def("kepler_flows", &kepler_flows, "mu"_a = 1.0);
  m.def("harmonic_flows", &harmonic_flows);
  m.def("split_flowset", &split_flowset, "dimension"_a, "drift"_a, "kick"_a, "kick_cost"_a = 1,
        "Flow set from Python callables drift(tau, x) and kick(tau, x).");

  m.def("kepler_init", [](double e) { return kepler_init(e).to_state(); }, "e"_a);
  m.def("kepler_exact", [](double e, double t) { return kepler_exact(e, t).to_state(); }, "e"_a,
        "t"_a);
  m.def("kepler_energy", [](const State& x) { return kepler_energy(x); }, "x"_a);

  m.def(
      "step",
      [](const std::string& method, const FlowSet& flows, const State& x, double h) {
        const auto& me = find_method(method);
        auto r = step_with_stages(me.scheme, flows, x, h);
        std::vector<State> est;
        for (const auto& w : me.estimators) est.push_back(apply_estimator(w, r));
        return py::dict("x_next"_a = r.x_next, "stages"_a = r.stages, "estimates"_a = est,
                        "fevals"_a = r.fevals);
      },
      "method"_a, "flows"_a, "x"_a, "h"_a);
  m.def(
      "integrate_fixed",
      [](const std::string& method, const FlowSet& flows, const State& x0, double h, double t0,
         double t_end) {
        py::gil_scoped_release unlock;
        auto r = integrate_fixed(find_method(method), flows, x0, h, t0, t_end);
        py::gil_scoped_acquire lock;
        return result_dict(r);
      },
      "method"_a, "flows"_a, "x0"_a, "h"_a, "t0"_a, "t_end"_a);
  m.def(
      "integrate_adaptive",
      [](const std::string& method, const FlowSet& flows, const State& x0, double t0,
         double t_end, double tol, double h_init) {
        ControllerConfig cfg;
        cfg.tol = tol;
        cfg.h_init = h_init;
        return result_dict(integrate_adaptive(find_method(method), flows, x0, t0, t_end, cfg));
      },
      "method"_a, "flows"_a, "x0"_a, "t0"_a, "t_end"_a, "tol"_a, "h_init"_a = 1e-2);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("method", &RunRecord::method)
      .def_readonly("e", &RunRecord::e)
      .def_readonly("h", &RunRecord::h)
      .def_readonly("nsteps", &RunRecord::nsteps)
      .def_readonly("fevals", &RunRecord::fevals)
      .def_readonly("ok", &RunRecord::ok)
      .def_readonly("error", &RunRecord::error)
      .def_readonly("E1_full", &RunRecord::E1_full)
      .def_readonly("E1_pos", &RunRecord::E1_pos)
      .def_readonly("E2", &RunRecord::E2)
      .def_readonly("E2_low", &RunRecord::E2_low)
      .def_readonly("energy_drift", &RunRecord::energy_drift);

  m.def(
      "run_scan",
      [](const std::vector<std::string>& methods, const std::vector<double>& es,
         const std::vector<double>& hs, double t_end, unsigned threads) {
        ScanConfig cfg;
        cfg.methods = methods;
        cfg.eccentricities = es;
        cfg.steps = hs;
        cfg.t_end = t_end;
        cfg.threads = threads;
        py::gil_scoped_release unlock;
        return run_scan(cfg);
      },
      "methods"_a, "e"_a, "h"_a, "t_end"_a = 20.0, "threads"_a = 0);
  m.def(
      "fit_order",
      [](const std::vector<double>& h, const std::vector<double>& err, double lo, double hi,
         int tail) {
        auto f = fit_loglog(h, err, lo, hi, tail);
        return py::dict("slope"_a = f.slope, "intercept"_a = f.intercept,
                        "residual"_a = f.residual, "points"_a = f.points);
      },
      "h"_a, "err"_a, "lo"_a = 1e-10, "hi"_a = 1e-3, "tail"_a = 0);

  py::class_<AdaptiveRecord>(m, "AdaptiveRecord")
      .def_readonly("tol", &AdaptiveRecord::tol)
      .def_readonly("achieved", &AdaptiveRecord::achieved)
      .def_readonly("accepted", &AdaptiveRecord::accepted)
      .def_readonly("rejected", &AdaptiveRecord::rejected)
      .def_readonly("fevals", &AdaptiveRecord::fevals)
      .def_readonly("aborted", &AdaptiveRecord::aborted)
      .def_readonly("h_cv", &AdaptiveRecord::h_cv);
  m.def(
      "run_adaptive_sweep",
      [](const std::string& method, double e, const std::vector<double>& tols, double t_end) {
        return run_adaptive_sweep(find_method(method), e, tols, t_end);
      },
      "method"_a, "e"_a, "tols"_a, "t_end"_a = 20.0);
}
