#include "seqnet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "seqnet/harness.hpp"
#include "seqnet/limits.hpp"
#include "seqnet/measures.hpp"
#include "seqnet/queues.hpp"

namespace seqnet {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> N;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<std::size_t> points;
  bool events = false;
  std::string slow;
  std::string fastinv;
  std::string x_axis, y_axis;
};

// Writes to --out when given, to `out` otherwise.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  const auto parent = std::filesystem::path(o.out).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << text;
}

ExperimentConfig require_config(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.dt) c.dt = *o.dt;
  if (o.points) c.grid_points = *o.points;
  if (o.N) c.N_list = {*o.N};
  return c;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad number '") + item + "' in " + what);
    }
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string fmt_vec(const Vec& v, const std::vector<std::string>& labels) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if (i < labels.size()) s += labels[i] + "=";
    s += fmt(v[i]);
  }
  return s + ")";
}

int cmd_classify(const Options& o, std::ostream& out) {
  const ExperimentConfig c = require_config(o);
  const Regime r = classify_regime(c.params, c.C_M, c.C_U, c.regulated);
  out << to_string(r) << '\n';
  out << "phi " << fmt(sequestration_index(c.params, c.C_M)) << '\n';
  out << "C_U " << fmt(c.C_U) << '\n';
  out << "regulated " << (c.regulated ? "true" : "false") << '\n';
  if (r == Regime::Boundary) return kExitOk;
  const auto labels = regime_slow_labels(r);
  const StabilityReport st = stability_report(r, c.params, c.C_M, c.C_U, c.regulated);
  out << "fixed_point " << fmt_vec(st.fixed_point, labels) << '\n';
  out << "eigenvalues";
  for (std::size_t i = 0; i < st.eigen_real.size(); ++i) {
    out << ' ' << fmt(st.eigen_real[i]);
    if (st.eigen_imag[i] != 0) out << (st.eigen_imag[i] > 0 ? "+" : "") << fmt(st.eigen_imag[i]) << 'i';
  }
  out << '\n' << "stable " << (st.stable ? "true" : "false") << '\n';
  if (st.p3)
    out << "p3 " << fmt((*st.p3)[0]) << ' ' << fmt((*st.p3)[1]) << ' ' << fmt((*st.p3)[2])
        << (st.p3_positive ? " positive" : " not-positive") << '\n';
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const ExperimentConfig c = require_config(o);
  if (c.N_list.empty()) throw ConfigError("simulate needs N (config key or --N)");
  const Regime r = classify_regime(c.params, c.C_M, c.C_U, c.regulated);
  if (r == Regime::Boundary) throw std::invalid_argument("no default initial state on a regime boundary");
  const ScalingConfig sc = ScalingConfig::from_ratios(c.N_list.front(), c.C_M, c.C_U);
  const Network net = build_network(c.params, sc, c.regulated, c.q_cap);
  const NetState x0 = default_initial(r, sc, c);
  SimulateOptions<5> opt;
  opt.record_events = o.events;
  opt.grid = uniform_grid(c.horizon, c.grid_points);
  const auto traj = simulate(net.channels, x0.point(), c.horizon, c.seed, opt);

  std::ostringstream csv;
  csv.precision(17);
  csv << "time,s,r,l,q,u,P\n";
  auto row = [&](double t, const Point<5>& x, std::int64_t p) {
    csv << t;
    for (auto v : x) csv << ',' << v;
    csv << ',' << p << '\n';
  };
  for (const auto& g : traj.grid) row(g.time, g.state, g.production);
  emit(o, out, csv.str());

  nlohmann::json meta = net.metadata();
  meta["seed"] = c.seed;
  meta["horizon"] = c.horizon;
  meta["regime"] = std::string(to_string(r));
  meta["initial"] = {x0.s, x0.r, x0.l, x0.q, x0.u};
  meta["events"] = traj.event_count;
  if (!o.out.empty()) {
    std::ofstream(o.out + ".json", std::ios::binary) << meta.dump(2) << '\n';
    if (o.events) {
      std::ofstream ev(o.out + ".events.csv", std::ios::binary);
      ev.precision(17);
      ev << "time,s,r,l,q,u,P,channel\n";
      for (const auto& e : traj.events) {
        ev << e.time;
        for (auto v : e.state) ev << ',' << v;
        ev << ',' << e.production << ',' << net.channels.channels[e.channel].name << '\n';
      }
    }
  }
  return kExitOk;
}

int cmd_ode(const Options& o, std::ostream& out) {
  const ExperimentConfig c = require_config(o);
  const Regime r = classify_regime(c.params, c.C_M, c.C_U, c.regulated);
  if (r == Regime::Boundary) throw std::invalid_argument("no limiting ODE on a regime boundary");
  const OdeSystem sys = limiting_ode(r, c.params, c.C_M, c.C_U, c.regulated);
  const OdeSolution sol =
      integrate(sys, macroscopic_initial(r, c), c.horizon, c.dt.value_or(default_dt(c.params)));
  if (sol.exited)
    throw OdeError("limiting ODE left its admissible region at t=" + fmt(sol.exit_time));
  const auto prod = production_limit(r, c.params, sol);
  std::ostringstream csv;
  csv.precision(17);
  csv << 't';
  for (const auto& l : sys.labels) csv << ',' << l;
  csv << ",production\n";
  for (double t : uniform_grid(c.horizon, c.grid_points)) {
    csv << t;
    for (double v : sol.at(t)) csv << ',' << v;
    csv << ',' << prod(t) << '\n';
  }
  emit(o, out, csv.str());
  return kExitOk;
}

int cmd_fastdist(const Options& o, std::ostream& out) {
  std::ostringstream csv;
  if (!o.fastinv.empty()) {
    const auto v = parse_list(o.fastinv, "--fastinv");
    if (v.size() != 4) throw std::invalid_argument("--fastinv expects lambda,mu_R,mu_L,mu_U");
    fastinv_dist({v[0], v[1], v[2], v[3]}).write_csv(csv, {"r", "l", "u"});
  } else {
    const ExperimentConfig c = require_config(o);
    const Regime r = classify_regime(c.params, c.C_M, c.C_U, c.regulated);
    if (r == Regime::Boundary) throw std::invalid_argument("no fast law on a regime boundary");
    const Vec slow = o.slow.empty() ? fixed_point(r, c.params, c.C_M, c.C_U)
                                    : parse_list(o.slow, "--slow");
    regime_fast_dist(r, c.params, c.C_M, c.C_U, slow).write_csv(csv, regime_fast_labels(r));
  }
  emit(o, out, csv.str());
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  ExperimentConfig c = require_config(o);
  if (!o.out.empty()) c.output_dir = o.out;
  const ConvergenceReport rep = run_experiment(c);
  out << "regime " << to_string(rep.regime) << '\n';
  for (const auto& r : rep.results) {
    out << "N=" << r.N << " slow_sup_mean=" << fmt(r.slow_sup_mean)
        << " slow_sup_p90=" << fmt(r.slow_sup_p90) << " fast_tv=" << fmt(r.fast_tv_pooled)
        << " production_rel=" << fmt(r.production_rel_final_mean)
        << (r.slow_pass && r.fast_pass && r.production_pass ? " ok" : " FAIL") << '\n';
  }
  out << "monotone " << (rep.monotone ? "true" : "false") << '\n';
  out << (rep.passed ? "PASS" : "FAIL") << '\n';
  return rep.passed ? kExitOk : kExitToleranceFailure;
}

struct Axis {
  std::string name;
  double lo = 0, hi = 0;
  std::size_t n = 0;
};

Axis parse_axis(const std::string& spec, const char* flag) {
  // name:lo:hi:n
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw std::invalid_argument(std::string(flag) + " expects name:lo:hi:n");
  Axis a;
  a.name = parts[0];
  try {
    a.lo = std::stod(parts[1]);
    a.hi = std::stod(parts[2]);
    a.n = static_cast<std::size_t>(std::stoul(parts[3]));
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("bad range in ") + flag);
  }
  if (a.n < 1) throw std::invalid_argument(std::string(flag) + " needs n >= 1");
  return a;
}

void set_param(ExperimentConfig& c, const std::string& name, double v) {
  auto& p = c.params;
  if (name == "k_RS") p.k_RS = v;
  else if (name == "k_SR") p.k_SR = v;
  else if (name == "k_LR") p.k_LR = v;
  else if (name == "k_Q0") p.k_Q0 = v;
  else if (name == "k_0Q") p.k_0Q = v;
  else if (name == "k_RI") p.k_RI = v;
  else if (name == "k_IL") p.k_IL = v;
  else if (name == "k_QU") p.k_QU = v;
  else if (name == "C_M") c.C_M = v;
  else if (name == "C_U") c.C_U = v;
  else throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig base = require_config(o);
  if (o.x_axis.empty() || o.y_axis.empty()) throw std::invalid_argument("sweep needs --x and --y");
  const Axis ax = parse_axis(o.x_axis, "--x"), ay = parse_axis(o.y_axis, "--y");
  auto at = [](const Axis& a, std::size_t k) {
    return a.n == 1 ? a.lo : a.lo + (a.hi - a.lo) * static_cast<double>(k) / static_cast<double>(a.n - 1);
  };
  std::ostringstream csv;
  csv.precision(12);
  csv << ax.name << ',' << ay.name << ",regime,phi\n";
  for (std::size_t i = 0; i < ax.n; ++i)
    for (std::size_t j = 0; j < ay.n; ++j) {
      ExperimentConfig c = base;
      set_param(c, ax.name, at(ax, i));
      set_param(c, ay.name, at(ay, j));
      const Regime r = classify_regime(c.params, c.C_M, c.C_U, c.regulated);
      csv << at(ax, i) << ',' << at(ay, j) << ',' << to_string(r) << ','
          << sequestration_index(c.params, c.C_M) << '\n';
    }
  emit(o, out, csv.str());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and limit checks for the sequestration network", "seqnet_cli"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--out", o.out, "output file (directory for verify)");
    sub->add_option("--seed", o.seed, "base seed, overrides the config");
  };
  auto* classify = app.add_subcommand("classify", "regime, sequestration index, fixed point, stability");
  common(classify);
  auto* sim = app.add_subcommand("simulate", "one trajectory sampled on the grid, as CSV");
  common(sim);
  sim->add_option("--N", o.N, "scaling parameter");
  sim->add_option("--horizon", o.horizon);
  sim->add_option("--points", o.points, "grid points");
  sim->add_flag("--events", o.events, "also write the event log (<out>.events.csv)");
  auto* ode = app.add_subcommand("ode", "integrate the limiting ODE, as CSV");
  common(ode);
  ode->add_option("--horizon", o.horizon);
  ode->add_option("--dt", o.dt);
  ode->add_option("--points", o.points, "output grid points");
  auto* fast = app.add_subcommand("fastdist", "fast-process invariant pmf, as CSV");
  common(fast);
  fast->add_option("--slow", o.slow, "comma-separated slow variables (default: fixed point)");
  fast->add_option("--fastinv", o.fastinv, "lambda,mu_R,mu_L,mu_U: emit that law instead");
  auto* verify = app.add_subcommand("verify", "run a convergence experiment");
  common(verify);
  verify->add_option("--N", o.N, "run a single N instead of the config list");
  auto* sweep = app.add_subcommand("sweep", "classification map over two parameters, as CSV");
  common(sweep);
  sweep->add_option("--x", o.x_axis, "name:lo:hi:n");
  sweep->add_option("--y", o.y_axis, "name:lo:hi:n");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*classify) return cmd_classify(o, out);
    if (*sim) return cmd_simulate(o, out);
    if (*ode) return cmd_ode(o, out);
    if (*fast) return cmd_fastdist(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*sweep) return cmd_sweep(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace seqnet
