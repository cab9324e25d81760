// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generator_solve.hpp"
#include "closed_laws.hpp"
#include "seqnet/harness.hpp"
#include "seqnet/limits.hpp"
#include "seqnet/measures.hpp"
#include "seqnet/queues.hpp"

using namespace seqnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// tolerances, pinned
constexpr double kSlowTol = 0.05;
constexpr double kFastTol = 0.10;
constexpr double kProdTol = 0.05;
constexpr double kPmfTol = 1e-9;
constexpr double kOracleTol = 1e-6;
constexpr double kP1Tol = 1e-10;

ExperimentConfig base_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.N_list = {500, 2000};
  c.replicas = 20;
  c.horizon = 5.0;
  return c;
}

ExperimentConfig stable_config() {
  ExperimentConfig c = base_config("stable");
  c.params.k_0Q = 2.0;
  c.params.k_IL = 1.0;
  c.C_M = 2.0;
  c.C_U = 1.0;
  c.initial.q0 = 1.0;
  c.seed = 101;
  return c;
}

ExperimentConfig subzero_config() {
  ExperimentConfig c = base_config("underloaded");
  c.params.k_0Q = 1.0;
  c.params.k_IL = 2.0;
  c.C_M = 2.0;
  c.C_U = 1.0;
  c.regulated = false;
  c.initial.l0 = 0.5;
  c.seed = 102;
  return c;
}

ExperimentConfig optseq_config() {
  ExperimentConfig c = base_config("optimal_sequestration");
  c.params.k_0Q = 1.0;
  c.params.k_IL = 2.0;
  c.C_M = 2.0;
  c.C_U = 10.0;
  c.seed = 103;
  return c;
}

ExperimentConfig saturation_config() {
  ExperimentConfig c = base_config("saturation");
  c.params.k_0Q = 3.0;
  c.params.k_IL = 12.0;
  c.C_M = 2.0;
  c.C_U = 0.25;
  c.initial.s0 = 0.5;
  c.initial.l0 = 0.25;
  c.seed = 104;
  return c;
}

const NResult& at_N(const ConvergenceReport& r, std::int64_t N) {
  for (const auto& x : r.results)
    if (x.N == N) return x;
  throw std::logic_error("N missing from report");
}

struct Runs {
  ConvergenceReport stable, subzero, optseq, saturation;
};

Outcome criterion_1(const Runs& r) {
  Outcome o;
  const double d2000 = at_N(r.stable, 2000).slow_sup_mean, d500 = at_N(r.stable, 500).slow_sup_mean;
  o.require(d2000 <= kSlowTol, "mean sup|Q/N-q| at N=2000 = " + num(d2000) + " (tol " + num(kSlowTol) + ")");
  o.require(d2000 < d500, "N=500 gives " + num(d500));
  return o;
}

Outcome criterion_2(const Runs& r) {
  Outcome o;
  const double tv = at_N(r.stable, 2000).fast_tv_pooled;
  o.require(tv <= kFastTol, "TV (R,L,U) at N=2000 = " + num(tv) + " (tol " + num(kFastTol) + ")");
  const ExperimentConfig c = stable_config();
  double worst = 0.0;
  for (double q : {0.25, 0.5, 1.0, 1.5, 3.0}) {
    const auto law = oracle::consistent_stable_law(c.params, c.C_M, c.C_U, q);
    const auto fi = fastinv_dist(stable_fast_rates(c.params, c.C_M, c.C_U, q));
    worst = std::max(worst, oracle::max_abs_diff(law, fi));
  }
  // the run sits at q = 1, where the literal form applies as written
  const double q_run = fixed_point(Regime::Stable, c.params, c.C_M, c.C_U)[0];
  worst = std::max(worst, oracle::max_abs_diff(oracle::literal_stable_law(c.params, c.C_M, c.C_U, q_run),
                                               regime_fast_dist(Regime::Stable, c.params, c.C_M, c.C_U,
                                                                std::vector<double>{q_run})));
  o.require(worst <= kPmfTol, "closed form vs fastinv max pmf error " + num(worst));
  return o;
}

Outcome criterion_3(const Runs& r) {
  Outcome o;
  const double a = at_N(r.stable, 2000).production_rel_final_mean;
  const double b = at_N(r.subzero, 2000).production_rel_final_mean;
  o.require(a <= kProdTol, "stable |P/N - k_IL T|/(k_IL T) = " + num(a));
  o.require(b <= kProdTol, "under-loaded |P/N - k_0Q T|/(k_0Q T) = " + num(b));
  return o;
}

Outcome criterion_4(const Runs& r) {
  Outcome o;
  const double d = at_N(r.subzero, 2000).slow_sup_mean;
  o.require(d <= kSlowTol, "mean sup|L/N-l| at N=2000 = " + num(d));
  return o;
}

Outcome criterion_5(const Runs& r) {
  Outcome o;
  const auto& x = at_N(r.optseq, 2000);
  o.require(x.slow_sup_mean <= kSlowTol, "mean sup|(S,U)/N-(s,u)| at N=2000 = " + num(x.slow_sup_mean));
  o.require(x.fast_tv_pooled <= kFastTol, "TV (R,L,Q) = " + num(x.fast_tv_pooled));
  return o;
}

Outcome criterion_6(const Runs& r) {
  Outcome o;
  const double d = at_N(r.saturation, 2000).slow_sup_mean;
  o.require(d <= kSlowTol, "mean sup|(S,L)/N-(s,l)| at N=2000 = " + num(d));
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const KineticParams unit;
  const FastInvRates fr{1.0, 1.0, 1.0, 1.0};
  const auto box = oracle::stationary_on_box(fastinv_ctmc_channels(fr), 12);
  const double e1 = oracle::max_pmf_error(box.dist, fastinv_dist(fr));
  o.require(e1 <= kOracleTol, "fastinv vs generator (cap 12) " + num(e1));
  const CascadeRates cr{1.0, 1.0, 1.0};
  const auto box2 = oracle::stationary_on_box(cascade_channels(cr, unit), 15);
  const double e2 = oracle::max_pmf_error(box2.dist, cascade_invariant(cr, unit));
  o.require(e2 <= kOracleTol, "cascade vs generator (cap 15) " + num(e2));
  return o;
}

Outcome criterion_8() {
  Outcome o;
  int below = 0;
  std::int64_t peak = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    std::int64_t m = 0;
    SimulateOptions<1> opt;
    opt.record_events = false;
    opt.on_sojourn = [&m](double, double, const Point<1>& x) { m = std::max(m, x[0]); };
    mm_inf_simulate(1.0, 1.0, 0, 1e4, derive_seed(801, i), opt);
    peak = std::max(peak, m);
    below += m < 50;
  }
  o.require(below == 100, "(a) " + std::to_string(below) + "/100 below 50, max " + std::to_string(peak));

  const double N = 1000.0;
  int close = 0;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    double sup = 0.0;
    SimulateOptions<1> opt;
    opt.record_events = false;
    opt.on_sojourn = [&sup, N](double from, double to, const Point<1>& x) {
      if (to > 10.0 && from <= 50.0) sup = std::max(sup, std::abs(static_cast<double>(x[0]) / N - 1.0));
    };
    mm_inf_simulate(N, 1.0, 2000, 50.0, derive_seed(802, i), opt);
    worst = std::max(worst, sup);
    close += sup <= 0.15;
  }
  o.require(close >= 95, "(b) " + std::to_string(close) + "/100 within 0.15, worst " + num(worst));
  return o;
}

Outcome criterion_9() {
  Outcome o;
  std::mt19937_64 gen(901);
  std::uniform_real_distribution<double> rate(0.1, 5.0), cm(1.05, 5.0), extra(0.05, 5.0);
  int good = 0;
  for (int drawn = 0; drawn < 100;) {
    KineticParams p{rate(gen), rate(gen), rate(gen), rate(gen),
                    rate(gen), rate(gen), rate(gen), rate(gen)};
    if (p.k_IL <= p.k_0Q) continue;
    const double C_M = cm(gen);
    const double C_U = sequestration_index(p, C_M) * (1.0 + extra(gen));
    if (classify_regime(p, C_M, C_U) != Regime::OptimalSequestration) continue;
    ++drawn;
    const auto rep = stability_report(Regime::OptimalSequestration, p, C_M, C_U, true);
    good += rep.p3_positive && rep.stable;
  }
  o.require(good == 100, "P3 > 0 and Re(eig) < 0 in " + std::to_string(good) + "/100 draws");

  const ExperimentConfig c = saturation_config();
  const Vec fp = fixed_point(Regime::Saturation, c.params, c.C_M, c.C_U);
  const double p1 = std::abs(p1_value(c.params, c.C_M, c.C_U, fp[0]));
  o.require(p1 <= kP1Tol, "|P1(s_inf)| = " + num(p1));

  const auto sys = limiting_ode(Regime::Saturation, c.params, c.C_M, c.C_U, true);
  bool monotone = true;
  for (double ds : {-0.2, -0.05, 0.05, 0.1}) {
    const auto sol = integrate(sys, {fp[0] + ds, fp[1] - std::max(0.0, ds)}, 20.0, default_dt(c.params));
    if (sol.exited) {
      monotone = false;
      continue;
    }
    const auto s = sol.component(0);
    for (std::size_t k = 1; k < s.size(); ++k) {
      const double gap0 = std::abs(s[k - 1] - fp[0]), gap1 = std::abs(s[k] - fp[0]);
      monotone = monotone && gap1 <= gap0 + 1e-15;
      monotone = monotone && (s[k] - fp[0]) * ds >= -1e-15;  // never crosses
    }
    monotone = monotone && std::abs(s.back() - fp[0]) < 1e-6;
  }
  o.require(monotone, "s(t) monotone toward s_inf from 4 perturbed starts");
  return o;
}

bool event_log_conserves(const Network& net, const Trajectory<5>& t) {
  const auto& sc = net.scaling;
  Point<5> x = t.initial;
  std::int64_t P = 0;
  for (const auto& e : t.events) {
    const auto& ch = net.channels.channels[e.channel];
    for (std::size_t i = 0; i < 5; ++i)
      if (e.state[i] - x[i] != ch.jump[i]) return false;
    if (e.production != P + (ch.counts_production ? 1 : 0)) return false;
    const NetState s = NetState::from_point(e.state);
    if (!s.valid_for(sc)) return false;
    if (s.initiating(sc) < 0 || s.free_m(sc) < 0 || s.paired_u(sc) < 0) return false;
    if (s.s + s.r + s.l + s.initiating(sc) != sc.N) return false;
    if (s.u + s.paired_u(sc) != sc.U0) return false;
    if (!net.regulated && s.s != 0) return false;
    x = e.state;
    P = e.production;
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_10() {
  Outcome o;
  std::uint64_t events = 0;
  bool conserved = true;
  std::size_t k = 0;
  for (const auto& cfg : {stable_config(), subzero_config(), optseq_config(), saturation_config()}) {
    const Regime r = classify_regime(cfg.params, cfg.C_M, cfg.C_U, cfg.regulated);
    const auto sc = ScalingConfig::from_ratios(200, cfg.C_M, cfg.C_U);
    const Network net = build_network(cfg.params, sc, cfg.regulated);
    for (std::uint64_t i = 0; i < 5; ++i) {
      const auto t = simulate(net.channels, default_initial(r, sc, cfg).point(), 5.0, derive_seed(1001 + k, i));
      events += t.events.size();
      conserved = conserved && event_log_conserves(net, t);
    }
    ++k;
  }
  o.require(conserved, "conservation on " + std::to_string(events) + " events");

  std::mt19937_64 gen(1002);
  std::uniform_real_distribution<double> rate(0.05, 5.0), cm(1.01, 5.0), cu(0.01, 5.0), lg(-6.0, 6.0);
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    KineticParams p{rate(gen), rate(gen), rate(gen), rate(gen),
                    rate(gen), rate(gen), rate(gen), rate(gen)};
    const double C_M = cm(gen), C_U = cu(gen), c = std::exp(lg(gen));
    same += classify_regime(p, C_M, C_U) == classify_regime(p.scaled(c), C_M, C_U) &&
            classify_regime(p, C_M, C_U, false) == classify_regime(p.scaled(c), C_M, C_U, false);
  }
  o.require(same == 1000, "classifier invariant in " + std::to_string(same) + "/1000 rescalings");

  // q' = 1 - q: halving the step divides the error by about 16
  const auto sys = limiting_ode(Regime::Stable, stable_config().params, 2.0, 1.0, true);
  const double exact = 1.0 - std::exp(-1.0);
  const double e1 = std::abs(integrate(sys, {0.0}, 1.0, 0.1).states.back()[0] - exact);
  const double e2 = std::abs(integrate(sys, {0.0}, 1.0, 0.05).states.back()[0] - exact);
  const double order = std::log2(e1 / e2);
  o.require(std::abs(order - 4.0) < 0.2, "RK4 observed order " + num(order));

  ExperimentConfig small = stable_config();
  small.N_list = {100, 200};
  small.replicas = 4;
  small.horizon = 2.0;
  const fs::path a = fs::temp_directory_path() / "seqnet_acceptance_det_a";
  const fs::path b = fs::temp_directory_path() / "seqnet_acceptance_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  small.output_dir = a.string();
  run_experiment(small);
  small.output_dir = b.string();
  small.threads = 1;
  run_experiment(small);
  bool identical = true;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    identical = identical && slurp(e.path()) == slurp(b / e.path().filename());
  }
  o.require(identical && files > 0, "byte-identical reruns over " + std::to_string(files) + " files");
  fs::remove_all(a);
  fs::remove_all(b);
  return o;
}

}  // namespace

int main() {
  Runs runs;
  runs.stable = run_experiment(stable_config());
  runs.subzero = run_experiment(subzero_config());
  runs.optseq = run_experiment(optseq_config());
  runs.saturation = run_experiment(saturation_config());

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [&] { return criterion_1(runs); }},
      {2, [&] { return criterion_2(runs); }},
      {3, [&] { return criterion_3(runs); }},
      {4, [&] { return criterion_4(runs); }},
      {5, [&] { return criterion_5(runs); }},
      {6, [&] { return criterion_6(runs); }},
      {7, criterion_7},
      {8, criterion_8},
      {9, criterion_9},
      {10, criterion_10},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
