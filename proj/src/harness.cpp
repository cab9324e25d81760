#include "seqnet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "seqnet/ctmc.hpp"
#include "seqnet/measures.hpp"
#include "seqnet/queues.hpp"

namespace seqnet {

namespace {

using nlohmann::json;

// Error tied to a key path; parse_config turns the path into a line number.
struct KeyError : ConfigError {
  std::vector<std::string> path;
  KeyError(std::vector<std::string> p, const std::string& msg)
      : ConfigError(msg), path(std::move(p)) {}
};

std::string join_path(const std::vector<std::string>& path) {
  std::string s;
  for (const auto& k : path) s += (s.empty() ? "" : ".") + k;
  return s;
}

template <class T>
T get_as(const json& j, const std::vector<std::string>& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw KeyError(path, "key '" + join_path(path) + "' has the wrong type (" + j.type_name() + ")");
  }
}

double get_number(const json& j, const std::vector<std::string>& path) {
  if (!j.is_number())
    throw KeyError(path, "key '" + join_path(path) + "' must be a number");
  return j.get<double>();
}

std::int64_t get_int(const json& j, const std::vector<std::string>& path) {
  if (!j.is_number_integer())
    throw KeyError(path, "key '" + join_path(path) + "' must be an integer");
  return j.get<std::int64_t>();
}

std::uint64_t get_uint(const json& j, const std::vector<std::string>& path) {
  if (!j.is_number_unsigned())
    throw KeyError(path, "key '" + join_path(path) + "' must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

const char* const kRateKeys[] = {"k_RS", "k_SR", "k_LR", "k_Q0", "k_0Q", "k_RI", "k_IL", "k_QU"};

double floor_scaled(double fraction, std::int64_t N) {
  return std::floor(fraction * static_cast<double>(N) + 1e-9);
}

double percentile90(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(v.size()))) - 1;
  return v[std::min(idx, v.size() - 1)];
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void ExperimentConfig::validate() const {
  params.validate();
  if (!(C_M > 1.0)) throw ConfigError("C_M must be > 1");
  if (!(C_U > 0.0)) throw ConfigError("C_U must be > 0");
  if (N_list.empty()) throw ConfigError("N list is empty");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1) throw ConfigError("N values must be >= 1");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw ConfigError("N list must be strictly increasing");
  }
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be >= 0");
  if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
  if (windows < 1) throw ConfigError("windows must be >= 1");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw ConfigError("burn_in must be in [0, 1)");
  if (dt && !(*dt > 0.0)) throw ConfigError("dt must be > 0");
  for (double t : {tol.slow, tol.fast_tv, tol.production, tol.monotone_slack})
    if (!(t >= 0.0)) throw ConfigError("tolerances must be >= 0");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  for (const char* k : {"k_RS", "k_SR", "k_LR", "k_Q0", "k_0Q", "k_RI", "k_IL", "k_QU", "C_M", "C_U"})
    if (!j.contains(k)) throw ConfigError(std::string("missing required key '") + k + "'", 1);

  for (const auto& [key, v] : j.items()) {
    const std::vector<std::string> path{key};
    if (key == "name") c.name = get_as<std::string>(v, path);
    else if (key == "k_RS") c.params.k_RS = get_number(v, path);
    else if (key == "k_SR") c.params.k_SR = get_number(v, path);
    else if (key == "k_LR") c.params.k_LR = get_number(v, path);
    else if (key == "k_Q0") c.params.k_Q0 = get_number(v, path);
    else if (key == "k_0Q") c.params.k_0Q = get_number(v, path);
    else if (key == "k_RI") c.params.k_RI = get_number(v, path);
    else if (key == "k_IL") c.params.k_IL = get_number(v, path);
    else if (key == "k_QU") c.params.k_QU = get_number(v, path);
    else if (key == "C_M") c.C_M = get_number(v, path);
    else if (key == "C_U") c.C_U = get_number(v, path);
    else if (key == "regulated") c.regulated = get_as<bool>(v, path);
    else if (key == "N") {
      if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) c.N_list.push_back(get_int(v[i], path));
      } else {
        c.N_list = {get_int(v, path)};
      }
    } else if (key == "replicas") c.replicas = get_uint(v, path);
    else if (key == "horizon") c.horizon = get_number(v, path);
    else if (key == "grid_points") c.grid_points = get_uint(v, path);
    else if (key == "windows") c.windows = get_uint(v, path);
    else if (key == "burn_in") c.burn_in = get_number(v, path);
    else if (key == "seed") c.seed = get_uint(v, path);
    else if (key == "output_dir") c.output_dir = get_as<std::string>(v, path);
    else if (key == "threads") c.threads = static_cast<unsigned>(get_uint(v, path));
    else if (key == "dt") c.dt = get_number(v, path);
    else if (key == "q_cap") c.q_cap = get_int(v, path);
    else if (key == "initial") {
      if (!v.is_object()) throw KeyError(path, "key 'initial' must be an object");
      for (const auto& [ik, iv] : v.items()) {
        const std::vector<std::string> ip{key, ik};
        if (ik == "q0") c.initial.q0 = get_number(iv, ip);
        else if (ik == "l0") c.initial.l0 = get_number(iv, ip);
        else if (ik == "s0") c.initial.s0 = get_number(iv, ip);
        else if (ik == "u0") c.initial.u0 = get_number(iv, ip);
        else if (ik == "r") c.initial.r = get_int(iv, ip);
        else if (ik == "l") c.initial.l = get_int(iv, ip);
        else if (ik == "q") c.initial.q = get_int(iv, ip);
        else if (ik == "u") c.initial.u = get_int(iv, ip);
        else if (ik == "u_small") c.initial.u_small = get_int(iv, ip);
        else throw KeyError(ip, "unknown key 'initial." + ik + "'");
      }
    } else if (key == "tolerances") {
      if (!v.is_object()) throw KeyError(path, "key 'tolerances' must be an object");
      for (const auto& [tk, tv] : v.items()) {
        const std::vector<std::string> tp{key, tk};
        if (tk == "slow") c.tol.slow = get_number(tv, tp);
        else if (tk == "fast_tv") c.tol.fast_tv = get_number(tv, tp);
        else if (tk == "production") c.tol.production = get_number(tv, tp);
        else if (tk == "monotone_slack") c.tol.monotone_slack = get_number(tv, tp);
        else throw KeyError(tp, "unknown key 'tolerances." + tk + "'");
      }
    } else {
      throw KeyError(path, "unknown key '" + key + "'");
    }
  }
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = to_json(c.params);
  j["name"] = c.name;
  j["C_M"] = c.C_M;
  j["C_U"] = c.C_U;
  j["regulated"] = c.regulated;
  j["N"] = c.N_list;
  j["replicas"] = c.replicas;
  j["horizon"] = c.horizon;
  j["grid_points"] = c.grid_points;
  j["windows"] = c.windows;
  j["burn_in"] = c.burn_in;
  j["seed"] = c.seed;
  json init = {{"r", c.initial.r}, {"l", c.initial.l}, {"q", c.initial.q}, {"u", c.initial.u},
               {"u_small", c.initial.u_small}};
  if (c.initial.q0) init["q0"] = *c.initial.q0;
  if (c.initial.l0) init["l0"] = *c.initial.l0;
  if (c.initial.s0) init["s0"] = *c.initial.s0;
  if (c.initial.u0) init["u0"] = *c.initial.u0;
  j["initial"] = init;
  j["tolerances"] = {{"slow", c.tol.slow},
                     {"fast_tv", c.tol.fast_tv},
                     {"production", c.tol.production},
                     {"monotone_slack", c.tol.monotone_slack}};
  if (c.dt) j["dt"] = *c.dt;
  if (c.q_cap > 0) j["q_cap"] = c.q_cap;
  return j;
}

namespace {

std::size_t line_of(const std::string& text, std::size_t pos) {
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(
                                                                             std::min(pos, text.size())),
                                             '\n')) +
         1;
}

std::size_t line_of_path(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& k : path) {
    const auto found = text.find("\"" + k + "\"", pos);
    if (found == std::string::npos) return 0;
    pos = found;
  }
  return line_of(text, pos);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset of the failure
    const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(origin + ":" + std::to_string(line) + ": malformed JSON: " + e.what(), line);
  }
  try {
    return config_from_json(j);
  } catch (const KeyError& e) {
    const std::size_t line = line_of_path(text, e.path);
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what(), line);
  } catch (const ConfigError& e) {
    const std::size_t line = e.line() ? e.line() : 1;
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what(), line);
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Vec macroscopic_initial(Regime regime, const ExperimentConfig& cfg) {
  if (regime == Regime::Boundary) throw std::invalid_argument("no initial condition on a boundary");
  const Vec fp = fixed_point(regime, cfg.params, cfg.C_M, cfg.C_U);
  const auto& in = cfg.initial;
  Vec x;
  switch (regime) {
    case Regime::Stable: x = {in.q0.value_or(fp[0])}; break;
    case Regime::UnderLoaded: x = {in.l0.value_or(fp[0])}; break;
    case Regime::OptimalSequestration: x = {in.s0.value_or(fp[0]), in.u0.value_or(fp[1])}; break;
    case Regime::Saturation: x = {in.s0.value_or(fp[0]), in.l0.value_or(fp[1])}; break;
    case Regime::Boundary: break;
  }
  const OdeSystem sys = limiting_ode(regime, cfg.params, cfg.C_M, cfg.C_U, cfg.regulated);
  if (!sys.admissible(x))
    throw std::invalid_argument("initial fractions outside the admissible region of regime " +
                                std::string(to_string(regime)));
  return x;
}

NetState default_initial(Regime regime, const ScalingConfig& sc, const ExperimentConfig& cfg) {
  const Vec x = macroscopic_initial(regime, cfg);
  const auto& in = cfg.initial;
  const auto N = sc.N;
  NetState st;
  st.r = in.r;
  st.l = in.l;
  st.q = in.q;
  st.u = in.u;
  switch (regime) {
    case Regime::Stable:
      st.q = static_cast<std::int64_t>(floor_scaled(x[0], N));
      break;
    case Regime::UnderLoaded:
      st.l = static_cast<std::int64_t>(floor_scaled(x[0], N));
      st.u = sc.U0 - in.u_small;
      break;
    case Regime::OptimalSequestration:
      st.s = static_cast<std::int64_t>(floor_scaled(x[0], N));
      st.u = static_cast<std::int64_t>(floor_scaled(x[1], N));
      break;
    case Regime::Saturation:
      st.s = static_cast<std::int64_t>(floor_scaled(x[0], N));
      st.l = static_cast<std::int64_t>(floor_scaled(x[1], N));
      st.u = sc.U0 - in.u_small;
      break;
    case Regime::Boundary: break;
  }
  if (!st.valid_for(sc) || (!cfg.regulated && st.s != 0))
    throw std::invalid_argument("initial state " + detail::format_point<5>(st.point()) +
                                " is not a valid network state for N=" + std::to_string(N));
  return st;
}

std::vector<double> uniform_grid(double horizon, std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k)
    g[k] = horizon * static_cast<double>(k) / static_cast<double>(points - 1);
  g.back() = horizon;
  return g;
}

json ConvergenceReport::to_json() const {
  json per_n = json::array();
  for (const auto& r : results) {
    per_n.push_back({{"N", r.N},
                     {"M0", r.scaling.M0},
                     {"U0", r.scaling.U0},
                     {"initial", {r.initial.s, r.initial.r, r.initial.l, r.initial.q, r.initial.u}},
                     {"seed", r.seed},
                     {"events", r.events},
                     {"slow_sup", r.slow_sup},
                     {"slow_sup_mean", r.slow_sup_mean},
                     {"slow_sup_p90", r.slow_sup_p90},
                     {"production_sup", r.production_sup},
                     {"production_sup_mean", r.production_sup_mean},
                     {"production_rel_final", r.production_rel_final},
                     {"production_rel_final_mean", r.production_rel_final_mean},
                     {"fast_tv_pooled", r.fast_tv_pooled},
                     {"fast_tv_tail", r.fast_tv_tail},
                     {"fast_tv_windows", r.fast_tv_windows},
                     {"fast_tv_replicas", r.fast_tv_replicas},
                     {"fast_tv_replica_mean", r.fast_tv_replica_mean},
                     {"slow_pass", r.slow_pass},
                     {"fast_pass", r.fast_pass},
                     {"production_pass", r.production_pass}});
  }
  return {{"name", name},
          {"regime", std::string(seqnet::to_string(regime))},
          {"sequestration_index", phi},
          {"fixed_point", fixed_point},
          {"seed_rule", "replica i of N-index k: derive_seed(derive_seed(seed, k), i)"},
          {"grid_points", grid.size()},
          {"results", per_n},
          {"monotone", monotone},
          {"passed", passed},
          {"config", config}};
}

namespace {

struct ReplicaOutcome {
  std::vector<GridSample<5>> grid;
  std::vector<OccupationMeasure> windows;
  std::uint64_t events = 0;
};

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
}

}  // namespace

ConvergenceReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Regime regime = classify_regime(cfg.params, cfg.C_M, cfg.C_U, cfg.regulated);
  if (regime == Regime::Boundary)
    throw std::invalid_argument("parameters sit on a regime boundary; no scaling limit applies");

  ConvergenceReport rep;
  rep.name = cfg.name;
  rep.regime = regime;
  rep.fixed_point = fixed_point(regime, cfg.params, cfg.C_M, cfg.C_U);
  rep.phi = sequestration_index(cfg.params, cfg.C_M);
  rep.config = to_json(cfg);
  rep.config.erase("output_dir");

  const double T = cfg.horizon;
  const Vec x0 = macroscopic_initial(regime, cfg);
  const OdeSystem sys = limiting_ode(regime, cfg.params, cfg.C_M, cfg.C_U, cfg.regulated);
  const double dt = cfg.dt.value_or(default_dt(cfg.params));
  const OdeSolution sol = integrate(sys, x0, T, dt);
  if (sol.exited)
    throw OdeError("limiting ODE left its admissible region at t=" + std::to_string(sol.exit_time));
  const auto prod = production_limit(regime, cfg.params, sol);

  const auto slow_proj = slow_projection(regime);
  if (T > 0) rep.grid = uniform_grid(T, cfg.grid_points);
  std::vector<Vec> ode_on_grid;
  for (double g : rep.grid) ode_on_grid.push_back(sol.at(g));

  // Sub-window references at the ODE midpoints, and their time average.
  const double t_burn = cfg.burn_in * T;
  std::vector<double> edges;
  std::vector<DiscreteDist> refs;
  DiscreteDist ref_avg;
  if (T > 0) {
    for (std::size_t k = 0; k <= cfg.windows; ++k)
      edges.push_back(t_burn + (T - t_burn) * static_cast<double>(k) / static_cast<double>(cfg.windows));
    edges.back() = T;
    for (std::size_t k = 0; k < cfg.windows; ++k)
      refs.push_back(regime_fast_dist(regime, cfg.params, cfg.C_M, cfg.C_U,
                                      sol.at(0.5 * (edges[k] + edges[k + 1]))));
    std::vector<double> w(cfg.windows);
    for (std::size_t k = 0; k < cfg.windows; ++k) w[k] = edges[k + 1] - edges[k];
    ref_avg = DiscreteDist::mixture(refs, w);
  }

  for (std::size_t ni = 0; ni < cfg.N_list.size(); ++ni) {
    NResult res;
    res.N = cfg.N_list[ni];
    res.scaling = ScalingConfig::from_ratios(res.N, cfg.C_M, cfg.C_U);
    res.initial = default_initial(regime, res.scaling, cfg);
    res.seed = derive_seed(cfg.seed, ni);
    if (T == 0) {
      rep.results.push_back(res);
      continue;
    }
    const Network net = build_network(cfg.params, res.scaling, cfg.regulated, cfg.q_cap);
    const auto fast_proj = fast_projection(regime, res.scaling);
    const double Nd = static_cast<double>(res.N);

    std::vector<ReplicaOutcome> outcomes(cfg.replicas);
    std::vector<std::exception_ptr> errors(cfg.replicas);
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.replicas));
    auto work = [&](unsigned worker) {
      for (std::size_t i = worker; i < cfg.replicas; i += threads) {
        try {
          OccupationAccumulator<5> acc(fast_proj, edges);
          SimulateOptions<5> opt;
          opt.record_events = false;
          opt.grid = rep.grid;
          opt.on_sojourn = acc.hook();
          auto traj = simulate(net.channels, res.initial.point(), T, derive_seed(res.seed, i), opt);
          outcomes[i] = {std::move(traj.grid), acc.windows(), traj.event_count};
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    if (threads <= 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    std::vector<OccupationMeasure> pooled_windows = outcomes.front().windows;
    for (std::size_t i = 0; i < cfg.replicas; ++i) {
      const auto& o = outcomes[i];
      res.events += o.events;
      double sup = 0.0, psup = 0.0;
      for (std::size_t k = 0; k < rep.grid.size(); ++k) {
        const Atom a = project<5>(o.grid[k].state, slow_proj);
        for (std::size_t c = 0; c < a.size(); ++c)
          sup = std::max(sup, std::abs(static_cast<double>(a[c]) / Nd - ode_on_grid[k][c]));
        psup = std::max(psup, std::abs(static_cast<double>(o.grid[k].production) / Nd - prod(rep.grid[k])));
      }
      res.slow_sup.push_back(sup);
      res.production_sup.push_back(psup);
      const double p_lim = prod(T);
      const double p_fin = static_cast<double>(o.grid.back().production) / Nd;
      res.production_rel_final.push_back(p_lim > 0 ? std::abs(p_fin - p_lim) / p_lim : std::abs(p_fin));

      OccupationMeasure mine = o.windows.front();
      for (std::size_t k = 1; k < o.windows.size(); ++k) mine.merge(o.windows[k]);
      res.fast_tv_replicas.push_back(tv_distance(normalize(mine), ref_avg).distance);
      if (i > 0)
        for (std::size_t k = 0; k < pooled_windows.size(); ++k) pooled_windows[k].merge(o.windows[k]);
    }
    OccupationMeasure pooled = pooled_windows.front();
    for (std::size_t k = 1; k < pooled_windows.size(); ++k) pooled.merge(pooled_windows[k]);
    const TvResult tv = tv_distance(normalize(pooled), ref_avg);
    res.fast_tv_pooled = tv.distance;
    res.fast_tv_tail = tv.tail_mass;
    for (std::size_t k = 0; k < pooled_windows.size(); ++k)
      res.fast_tv_windows.push_back(tv_distance(normalize(pooled_windows[k]), refs[k]).distance);

    res.slow_sup_mean = mean_of(res.slow_sup);
    res.slow_sup_p90 = percentile90(res.slow_sup);
    res.production_sup_mean = mean_of(res.production_sup);
    res.production_rel_final_mean = mean_of(res.production_rel_final);
    res.fast_tv_replica_mean = mean_of(res.fast_tv_replicas);
    res.slow_pass = res.slow_sup_mean <= cfg.tol.slow;
    res.fast_pass = res.fast_tv_pooled <= cfg.tol.fast_tv;
    res.production_pass = res.production_rel_final_mean <= cfg.tol.production;

    if (!cfg.output_dir.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(cfg.output_dir);
      const std::string tag = "_N" + std::to_string(res.N);
      std::ostringstream slow;
      slow.precision(17);
      slow << 't';
      for (const auto& l : sys.labels) slow << ",ode_" << l;
      for (const auto& p : slow_proj) slow << ",mean_" << p.label;
      slow << ",production_limit,mean_production\n";
      for (std::size_t k = 0; k < rep.grid.size(); ++k) {
        slow << rep.grid[k];
        for (double v : ode_on_grid[k]) slow << ',' << v;
        Vec m(slow_proj.size(), 0.0);
        double pm = 0.0;
        for (const auto& o : outcomes) {
          const Atom a = project<5>(o.grid[k].state, slow_proj);
          for (std::size_t c = 0; c < a.size(); ++c) m[c] += static_cast<double>(a[c]) / Nd;
          pm += static_cast<double>(o.grid[k].production) / Nd;
        }
        for (double v : m) slow << ',' << v / static_cast<double>(cfg.replicas);
        slow << ',' << prod(rep.grid[k]) << ',' << pm / static_cast<double>(cfg.replicas) << '\n';
      }
      write_text(fs::path(cfg.output_dir) / ("slow" + tag + ".csv"), slow.str());

      std::ostringstream occ;
      pooled.write_csv(occ);
      write_text(fs::path(cfg.output_dir) / ("occupation" + tag + ".csv"), occ.str());

      std::ostringstream per;
      per.precision(17);
      per << "replica,seed,slow_sup,production_sup,production_rel_final,fast_tv\n";
      for (std::size_t i = 0; i < cfg.replicas; ++i)
        per << i << ',' << derive_seed(res.seed, i) << ',' << res.slow_sup[i] << ','
            << res.production_sup[i] << ',' << res.production_rel_final[i] << ','
            << res.fast_tv_replicas[i] << '\n';
      write_text(fs::path(cfg.output_dir) / ("replicas" + tag + ".csv"), per.str());
    }
    rep.results.push_back(std::move(res));
  }

  rep.passed = true;
  for (const auto& r : rep.results)
    rep.passed = rep.passed && r.slow_pass && r.fast_pass && r.production_pass;
  for (std::size_t k = 1; k < rep.results.size(); ++k)
    if (rep.results[k].slow_sup_mean >
        rep.results[k - 1].slow_sup_mean * (1.0 + cfg.tol.monotone_slack))
      rep.monotone = false;
  rep.passed = rep.passed && rep.monotone;

  if (!cfg.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    write_text(fs::path(cfg.output_dir) / "report.json", rep.to_json().dump(2) + "\n");
    if (T > 0) {
      std::ostringstream ode;
      ode.precision(17);
      ode << 't';
      for (const auto& l : sys.labels) ode << ',' << l;
      ode << ",production\n";
      for (std::size_t k = 0; k < rep.grid.size(); ++k) {
        ode << rep.grid[k];
        for (double v : ode_on_grid[k]) ode << ',' << v;
        ode << ',' << prod(rep.grid[k]) << '\n';
      }
      write_text(fs::path(cfg.output_dir) / "ode.csv", ode.str());
      std::ostringstream ref;
      ref_avg.write_csv(ref, regime_fast_labels(regime));
      write_text(fs::path(cfg.output_dir) / "fast_reference.csv", ref.str());
    }
  }
  return rep;
}

}  // namespace seqnet
