#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "seqnet/cli.hpp"
#include "seqnet/harness.hpp"
#include "seqnet/limits.hpp"
#include "seqnet/measures.hpp"
#include "seqnet/queues.hpp"

namespace py = pybind11;
using namespace seqnet;

namespace {

py::dict dist_to_dict(const DiscreteDist& d) {
  py::dict out;
  for (const auto& [a, p] : d.atoms()) out[py::tuple(py::cast(a))] = p;
  return out;
}

DiscreteDist dict_to_dist(const py::dict& d) {
  std::map<Atom, double> atoms;
  std::size_t dim = 0;
  for (const auto& [k, v] : d) {
    Atom a = py::isinstance<py::tuple>(k) || py::isinstance<py::list>(k) ? k.cast<Atom>()
                                                                          : Atom{k.cast<std::int64_t>()};
    if (dim == 0) dim = a.size();
    if (a.size() != dim) throw std::invalid_argument("atoms of mixed dimension");
    atoms[std::move(a)] += v.cast<double>();
  }
  if (atoms.empty()) throw std::invalid_argument("empty distribution");
  return DiscreteDist(dim, std::move(atoms));
}

py::dict simulate_network(const KineticParams& p, double C_M, double C_U, std::int64_t N,
                          bool regulated, const std::array<std::int64_t, 5>& initial, double horizon,
                          std::uint64_t seed, std::size_t points, bool events) {
  const ScalingConfig sc = ScalingConfig::from_ratios(N, C_M, C_U);
  const Network net = build_network(p, sc, regulated);
  SimulateOptions<5> opt;
  opt.record_events = events;
  opt.grid = uniform_grid(horizon, points);
  Trajectory<5> t;
  {
    py::gil_scoped_release release;
    t = simulate(net.channels, initial, horizon, seed, opt);
  }
  std::vector<double> times;
  std::vector<std::array<std::int64_t, 5>> states;
  std::vector<std::int64_t> production;
  for (const auto& g : t.grid) {
    times.push_back(g.time);
    states.push_back(g.state);
    production.push_back(g.production);
  }
  py::dict out;
  out["time"] = times;
  out["state"] = states;
  out["production"] = production;
  out["events"] = t.event_count;
  out["M0"] = sc.M0;
  out["U0"] = sc.U0;
  if (events) {
    py::list log;
    for (const auto& e : t.events)
      log.append(py::make_tuple(e.time, net.channels.channels[e.channel].name, e.state, e.production));
    out["event_log"] = log;
  }
  return out;
}

py::dict stability_dict(const StabilityReport& r) {
  py::dict d;
  d["fixed_point"] = r.fixed_point;
  d["jacobian"] = r.jacobian;
  d["eigen_real"] = r.eigen_real;
  d["eigen_imag"] = r.eigen_imag;
  d["stable"] = r.stable;
  if (r.p3) {
    d["p3"] = *r.p3;
    d["p3_positive"] = r.p3_positive;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_seqnet, m) {
  m.doc() = "Sequestration network simulator and its scaling limits";

  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<OdeError>(m, "OdeError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Regime>(m, "Regime")
      .value("Stable", Regime::Stable)
      .value("OptimalSequestration", Regime::OptimalSequestration)
      .value("Saturation", Regime::Saturation)
      .value("UnderLoaded", Regime::UnderLoaded)
      .value("Boundary", Regime::Boundary);

  py::class_<KineticParams>(m, "KineticParams")
      .def(py::init<>())
      .def(py::init([](py::kwargs kw) {
        KineticParams p;
        for (const auto& [k, v] : kw) {
          const auto key = k.cast<std::string>();
          const double x = v.cast<double>();
          if (key == "k_RS") p.k_RS = x;
          else if (key == "k_SR") p.k_SR = x;
          else if (key == "k_LR") p.k_LR = x;
          else if (key == "k_Q0") p.k_Q0 = x;
          else if (key == "k_0Q") p.k_0Q = x;
          else if (key == "k_RI") p.k_RI = x;
          else if (key == "k_IL") p.k_IL = x;
          else if (key == "k_QU") p.k_QU = x;
          else throw py::key_error("unknown rate '" + key + "'");
        }
        p.validate();
        return p;
      }))
      .def_readwrite("k_RS", &KineticParams::k_RS)
      .def_readwrite("k_SR", &KineticParams::k_SR)
      .def_readwrite("k_LR", &KineticParams::k_LR)
      .def_readwrite("k_Q0", &KineticParams::k_Q0)
      .def_readwrite("k_0Q", &KineticParams::k_0Q)
      .def_readwrite("k_RI", &KineticParams::k_RI)
      .def_readwrite("k_IL", &KineticParams::k_IL)
      .def_readwrite("k_QU", &KineticParams::k_QU)
      .def("scaled", &KineticParams::scaled)
      .def("__repr__", [](const KineticParams& p) { return "KineticParams(" + to_json(p).dump() + ")"; });

  m.def("classify_regime",
        py::overload_cast<const KineticParams&, double, double, bool, double>(&classify_regime),
        py::arg("params"), py::arg("C_M"), py::arg("C_U"),
        py::arg("regulated") = true, py::arg("rel_tol") = kBoundaryRelTol);
  m.def("sequestration_index", &sequestration_index, py::arg("params"), py::arg("C_M"));
  m.def("fixed_point", &fixed_point, py::arg("regime"), py::arg("params"), py::arg("C_M"), py::arg("C_U"));
  m.def(
      "stability_report",
      [](Regime r, const KineticParams& p, double C_M, double C_U, bool regulated) {
        return stability_dict(stability_report(r, p, C_M, C_U, regulated));
      },
      py::arg("regime"), py::arg("params"), py::arg("C_M"), py::arg("C_U"), py::arg("regulated") = true);

  m.def("simulate", &simulate_network, py::arg("params"), py::arg("C_M"), py::arg("C_U"), py::arg("N"),
        py::arg("regulated"), py::arg("initial"), py::arg("horizon"), py::arg("seed"),
        py::arg("points") = 200, py::arg("events") = false,
        "One trajectory sampled on a uniform grid. initial = (s, r, l, q, u).");

  m.def(
      "integrate_limit",
      [](Regime r, const KineticParams& p, double C_M, double C_U, bool regulated, const Vec& x0,
         double horizon, std::optional<double> dt) {
        const OdeSystem sys = limiting_ode(r, p, C_M, C_U, regulated);
        const OdeSolution sol = integrate(sys, x0, horizon, dt.value_or(default_dt(p)));
        py::dict d;
        d["t"] = sol.times;
        d["x"] = sol.states;
        d["labels"] = sol.labels;
        d["exited"] = sol.exited;
        if (!sol.exited) {
          const auto prod = production_limit(r, p, sol);
          std::vector<double> pr;
          for (double t : sol.times) pr.push_back(prod(t));
          d["production"] = pr;
        }
        return d;
      },
      py::arg("regime"), py::arg("params"), py::arg("C_M"), py::arg("C_U"), py::arg("regulated"),
      py::arg("x0"), py::arg("horizon"), py::arg("dt") = py::none());

  m.def(
      "regime_fast_dist",
      [](Regime r, const KineticParams& p, double C_M, double C_U, const std::vector<double>& slow) {
        return dist_to_dict(regime_fast_dist(r, p, C_M, C_U, slow));
      },
      py::arg("regime"), py::arg("params"), py::arg("C_M"), py::arg("C_U"), py::arg("slow"));
  m.def("regime_fast_labels", &regime_fast_labels);
  m.def(
      "fastinv_dist",
      [](double lambda, double mu_R, double mu_L, double mu_U) {
        return dist_to_dict(fastinv_dist({lambda, mu_R, mu_L, mu_U}));
      },
      py::arg("lam"), py::arg("mu_R"), py::arg("mu_L"), py::arg("mu_U"));
  m.def(
      "mm_inf_invariant", [](double lambda, double mu) { return dist_to_dict(mm_inf_invariant(lambda, mu)); },
      py::arg("lam"), py::arg("mu"));
  m.def(
      "tv_distance",
      [](const py::dict& a, const py::dict& b) { return tv_distance(dict_to_dist(a), dict_to_dist(b)).distance; },
      py::arg("p"), py::arg("q"));

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig c = parse_config(config_json, "config");
        std::string out;
        {
          py::gil_scoped_release release;
          out = run_experiment(c).to_json().dump();
        }
        return out;
      },
      py::arg("config_json"), "Runs a convergence experiment; returns the report as JSON text.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
