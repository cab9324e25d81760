#pragma once

// Experiment runner: sweeps over N, compares simulated paths with the
// limiting ODE and fast occupation laws with their closed forms.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqnet/limits.hpp"
#include "seqnet/model.hpp"

namespace seqnet {

/// Malformed or invalid configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Macroscopic initial data. Unset fractions default to the regime's fixed
/// point; the integer fields are the O(1) coordinates.
struct InitialSpec {
  std::optional<double> q0, l0, s0, u0;
  std::int64_t r = 0;
  std::int64_t l = 0;
  std::int64_t q = 0;
  std::int64_t u = 0;
  /// U0 - u for the regimes where free U is macroscopic.
  std::int64_t u_small = 0;
};

struct Tolerances {
  double slow = 0.05;        // mean over replicas of the sup-norm deviation
  double fast_tv = 0.10;     // pooled occupation vs time-averaged reference
  double production = 0.05;  // relative error of P_N(T)/N
  double monotone_slack = 0.10;
};

struct ExperimentConfig {
  std::string name;
  KineticParams params;
  double C_M = 2.0;
  double C_U = 1.0;
  bool regulated = true;
  std::vector<std::int64_t> N_list;
  std::size_t replicas = 20;
  double horizon = 5.0;
  std::size_t grid_points = 200;
  std::size_t windows = 10;
  double burn_in = 0.1;  // fraction of the horizon, fast comparisons only
  InitialSpec initial;
  Tolerances tol;
  std::uint64_t seed = 1;
  std::string output_dir;
  unsigned threads = 0;
  std::optional<double> dt;
  std::int64_t q_cap = 0;

  void validate() const;
};

/// Keys of the flat model document: the eight rates, C_M, C_U, regulated.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
/// Parses with line numbers in every error that can be tied to the text.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_config(const std::string& path);

/// The scaled slow initial condition. Requires a non-Boundary regime.
Vec macroscopic_initial(Regime regime, const ExperimentConfig& cfg);
NetState default_initial(Regime regime, const ScalingConfig& sc, const ExperimentConfig& cfg);

/// Uniform grid with `points` samples on [0, horizon].
std::vector<double> uniform_grid(double horizon, std::size_t points);

struct NResult {
  std::int64_t N = 0;
  ScalingConfig scaling;
  NetState initial;
  std::uint64_t seed = 0;  // replica i uses derive_seed(seed, i)
  std::vector<double> slow_sup;
  double slow_sup_mean = 0.0;
  double slow_sup_p90 = 0.0;
  std::vector<double> production_sup;
  double production_sup_mean = 0.0;
  std::vector<double> production_rel_final;
  double production_rel_final_mean = 0.0;
  double fast_tv_pooled = 0.0;
  double fast_tv_tail = 0.0;
  std::vector<double> fast_tv_windows;  // replicas pooled, one per sub-window
  std::vector<double> fast_tv_replicas; // windows pooled, one per replica
  double fast_tv_replica_mean = 0.0;
  std::uint64_t events = 0;
  bool slow_pass = true;
  bool fast_pass = true;
  bool production_pass = true;
};

struct ConvergenceReport {
  std::string name;
  Regime regime = Regime::Boundary;
  Vec fixed_point;
  double phi = 0.0;
  std::vector<double> grid;
  std::vector<NResult> results;
  bool monotone = true;
  bool passed = true;
  nlohmann::json config;

  nlohmann::json to_json() const;
};

/// Deterministic given the config. Writes report.json and CSVs to
/// cfg.output_dir when it is set.
ConvergenceReport run_experiment(const ExperimentConfig& cfg);

}  // namespace seqnet
