#pragma once

// Exact simulation of finite-channel continuous-time Markov chains on Z^D
// (Gillespie direct method). Used for the full network (D = 5) as well as
// for the M/M/infinity building blocks and the fast-process networks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "seqnet/rng.hpp"

namespace seqnet {

template <std::size_t D>
using Point = std::array<std::int64_t, D>;

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <std::size_t D>
struct Channel {
  std::string name;
  Point<D> jump{};
  std::function<double(const Point<D>&)> propensity;
  /// Firing increments the production counter P(t).
  bool counts_production = false;
};

/// A set of channels plus the state-space description used for checking.
template <std::size_t D>
struct ChannelSet {
  std::vector<Channel<D>> channels;
  /// Membership test for the state space; empty means "all of N^D".
  std::function<bool(const Point<D>&)> admissible;
  /// Hard per-coordinate caps. Exceeding one is a SimulationError.
  Point<D> hard_cap = filled(std::numeric_limits<std::int64_t>::max());
  std::vector<std::string> coordinate_names;

  static Point<D> filled(std::int64_t v) {
    Point<D> p;
    p.fill(v);
    return p;
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
      if (channels[i].name == name) return i;
    throw std::out_of_range("no channel named '" + name + "'");
  }
};

template <std::size_t D>
struct Event {
  double time = 0.0;
  std::uint32_t channel = 0;
  Point<D> state{};             // post-jump state
  std::int64_t production = 0;  // P(time), right-continuous
};

template <std::size_t D>
struct GridSample {
  double time = 0.0;
  Point<D> state{};
  std::int64_t production = 0;
};

template <std::size_t D>
struct Trajectory {
  Point<D> initial{};
  std::vector<Event<D>> events;  // empty when the event log is disabled
  bool events_recorded = true;
  std::vector<GridSample<D>> grid;  // samples requested at simulation time
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t event_count = 0;
  Point<D> final_state{};
  std::int64_t final_production = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Called for every maximal interval [from, to) on which the chain sits in
/// `state`, in increasing time order; intervals tile [0, horizon].
template <std::size_t D>
using SojournHook = std::function<void(double from, double to, const Point<D>& state)>;

template <std::size_t D>
struct SimulateOptions {
  bool record_events = true;
  /// Nondecreasing times in [0, horizon] sampled during the run.
  std::vector<double> grid;
  bool check_invariants = true;
  SojournHook<D> on_sojourn;
};

namespace detail {

/// Index of the channel selected by `target` in [0, total): the first i with
/// target < a_0 + ... + a_i. Channels with zero propensity are never chosen.
inline std::size_t pick_channel(std::span<const double> propensities, double target) {
  double acc = 0.0;
  std::size_t last_positive = propensities.size();
  for (std::size_t i = 0; i < propensities.size(); ++i) {
    if (propensities[i] <= 0.0) continue;
    last_positive = i;
    acc += propensities[i];
    if (target < acc) return i;
  }
  return last_positive;  // rounding at the top end
}

template <std::size_t D>
std::string format_point(const Point<D>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < D; ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

inline void check_grid(std::span<const double> grid, double horizon) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || grid[i] > horizon)
      throw std::invalid_argument("grid time " + std::to_string(grid[i]) +
                                  " outside [0, horizon]");
    if (i > 0 && grid[i] < grid[i - 1])
      throw std::invalid_argument("grid times must be nondecreasing");
  }
}

}  // namespace detail

template <std::size_t D>
Trajectory<D> simulate(const ChannelSet<D>& net, const Point<D>& initial, double horizon,
                       std::uint64_t seed, const SimulateOptions<D>& options = {}) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be finite and >= 0");
  for (std::size_t i = 0; i < D; ++i)
    if (initial[i] < 0) throw std::invalid_argument("initial state has a negative coordinate");
  if (net.admissible && !net.admissible(initial))
    throw std::invalid_argument("initial state " + detail::format_point<D>(initial) +
                                " is outside the state space");
  detail::check_grid(options.grid, horizon);

  Trajectory<D> traj;
  traj.initial = initial;
  traj.horizon = horizon;
  traj.seed = seed;
  traj.events_recorded = options.record_events;
  traj.grid.reserve(options.grid.size());

  Rng rng(seed);
  Point<D> x = initial;
  std::int64_t production = 0;
  double t = 0.0;
  std::size_t next_grid = 0;
  const std::size_t m = net.channels.size();
  std::vector<double> a(m);

  auto fill_grid_before = [&](double limit, bool inclusive) {
    while (next_grid < options.grid.size() &&
           (options.grid[next_grid] < limit || (inclusive && options.grid[next_grid] == limit))) {
      traj.grid.push_back({options.grid[next_grid], x, production});
      ++next_grid;
    }
  };

  for (;;) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double ai = net.channels[i].propensity(x);
      if (!(ai >= 0.0) || !std::isfinite(ai))
        throw SimulationError("channel '" + net.channels[i].name +
                              "' has invalid propensity at " + detail::format_point<D>(x));
      a[i] = ai;
      total += ai;
    }
    if (!std::isfinite(total)) throw SimulationError("total propensity overflow");

    const double t_next = total > 0.0 ? t + rng.exponential(total)
                                      : std::numeric_limits<double>::infinity();
    if (t_next > horizon) {
      fill_grid_before(horizon, true);
      if (options.on_sojourn && horizon > t) options.on_sojourn(t, horizon, x);
      break;
    }
    fill_grid_before(t_next, false);
    if (options.on_sojourn) options.on_sojourn(t, t_next, x);

    const std::size_t k = detail::pick_channel(a, rng.uniform_open() * total);
    const Channel<D>& ch = net.channels[k];
    for (std::size_t i = 0; i < D; ++i) x[i] += ch.jump[i];
    if (ch.counts_production) ++production;
    t = t_next;

    if (options.check_invariants) {
      bool ok = true;
      for (std::size_t i = 0; i < D; ++i) ok = ok && x[i] >= 0;
      if (!ok || (net.admissible && !net.admissible(x)))
        throw std::logic_error("channel '" + ch.name +
                               "' fired with positive propensity into inadmissible state " +
                               detail::format_point<D>(x));
    }
    for (std::size_t i = 0; i < D; ++i)
      if (x[i] > net.hard_cap[i])
        throw SimulationError("coordinate " + std::to_string(i) + " exceeded hard cap " +
                              std::to_string(net.hard_cap[i]) + " at t=" + std::to_string(t));

    ++traj.event_count;
    if (options.record_events)
      traj.events.push_back({t, static_cast<std::uint32_t>(k), x, production});
  }

  traj.final_state = x;
  traj.final_production = production;
  return traj;
}

/// Right-continuous evaluation of a recorded trajectory: the state at time g
/// includes every event with time <= g.
template <std::size_t D>
std::vector<GridSample<D>> sample_on_grid(const Trajectory<D>& traj, std::span<const double> grid) {
  if (!traj.events_recorded)
    throw std::invalid_argument("trajectory has no event log; sample during simulation instead");
  detail::check_grid(grid, traj.horizon);
  std::vector<GridSample<D>> out;
  out.reserve(grid.size());
  Point<D> x = traj.initial;
  std::int64_t production = 0;
  std::size_t e = 0;
  for (double g : grid) {
    while (e < traj.events.size() && traj.events[e].time <= g) {
      x = traj.events[e].state;
      production = traj.events[e].production;
      ++e;
    }
    out.push_back({g, x, production});
  }
  return out;
}

/// Runs `count` independent replicas. Replica i uses seed
/// derive_seed(base_seed, i); results are indexed by i, so the output does
/// not depend on `threads`.
template <std::size_t D>
std::vector<Trajectory<D>> run_replicas(const ChannelSet<D>& net, const Point<D>& initial,
                                        double horizon, std::uint64_t base_seed,
                                        std::size_t count, const SimulateOptions<D>& options = {},
                                        unsigned threads = 0) {
  if (count == 0) throw std::invalid_argument("replica count must be >= 1");
  std::vector<Trajectory<D>> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

  std::vector<std::exception_ptr> errors(count);
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < count; i += threads) {
      try {
        out[i] = simulate(net, initial, horizon, derive_seed(base_seed, i), options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace seqnet
