#pragma once

// Occupation measures of trajectories on a subset of coordinates, and the
// plumbing that turns them into comparable pmfs.

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqnet/ctmc.hpp"
#include "seqnet/distribution.hpp"
#include "seqnet/model.hpp"

namespace seqnet {

/// offset + sign * x[index]. U0 - u is {4, U0, -1}.
struct CoordinateProjection {
  std::size_t index = 0;
  std::int64_t offset = 0;
  std::int64_t sign = 1;
  std::string label;

  template <std::size_t D>
  std::int64_t operator()(const Point<D>& x) const {
    return offset + sign * x[index];
  }
};

std::vector<CoordinateProjection> identity_projection(std::size_t dim,
                                                      const std::vector<std::string>& labels = {});

template <std::size_t D>
Atom project(const Point<D>& x, std::span<const CoordinateProjection> proj) {
  Atom a;
  a.reserve(proj.size());
  for (const auto& p : proj) {
    if (p.index >= D) throw std::out_of_range("projection index out of range");
    a.push_back(p(x));
  }
  return a;
}

struct OccupationMeasure {
  std::vector<std::string> labels;
  double t0 = 0.0;
  double t1 = 0.0;
  std::map<Atom, double> weights;  // atom -> total sojourn time

  double length() const { return t1 - t0; }
  double total_weight() const;
  void add(const Atom& a, double dt) { weights[a] += dt; }
  /// Adds the weights of `other`; windows are concatenated when adjacent and
  /// otherwise only the length bookkeeping is summed.
  void merge(const OccupationMeasure& other);
  /// Columns: labels, sojourn_time, probability.
  void write_csv(std::ostream& os) const;
};

/// Exact sojourn accounting from the event log over [t0, t1].
template <std::size_t D>
OccupationMeasure occupation(const Trajectory<D>& traj, std::span<const CoordinateProjection> proj,
                             double t0, double t1) {
  if (!traj.events_recorded)
    throw std::invalid_argument("occupation needs an event log; use OccupationAccumulator instead");
  if (!(t0 >= 0.0) || !(t1 >= t0) || t1 > traj.horizon)
    throw std::invalid_argument("occupation window outside [0, horizon]");
  OccupationMeasure om;
  for (const auto& p : proj) om.labels.push_back(p.label);
  om.t0 = t0;
  om.t1 = t1;
  Point<D> x = traj.initial;
  double from = 0.0;
  auto add_piece = [&](double a, double b) {
    const double lo = std::max(a, t0), hi = std::min(b, t1);
    if (hi > lo) om.add(project<D>(x, proj), hi - lo);
  };
  for (const auto& e : traj.events) {
    if (from >= t1) break;
    add_piece(from, e.time);
    x = e.state;
    from = e.time;
  }
  add_piece(from, traj.horizon);
  return om;
}

/// Builds occupation measures of consecutive windows during a simulation
/// through the sojourn hook. Windows are [edges[k], edges[k+1]].
template <std::size_t D>
class OccupationAccumulator {
 public:
  OccupationAccumulator(std::vector<CoordinateProjection> proj, std::vector<double> edges)
      : proj_(std::move(proj)), edges_(std::move(edges)) {
    if (edges_.size() < 2) throw std::invalid_argument("need at least one window");
    for (std::size_t k = 1; k < edges_.size(); ++k)
      if (!(edges_[k] > edges_[k - 1])) throw std::invalid_argument("window edges must increase");
    windows_.resize(edges_.size() - 1);
    for (std::size_t k = 0; k < windows_.size(); ++k) {
      for (const auto& p : proj_) windows_[k].labels.push_back(p.label);
      windows_[k].t0 = edges_[k];
      windows_[k].t1 = edges_[k + 1];
    }
  }

  void add(double from, double to, const Point<D>& x) {
    if (to <= edges_.front() || from >= edges_.back()) return;
    const Atom a = project<D>(x, proj_);
    auto k = static_cast<std::size_t>(
        std::upper_bound(edges_.begin(), edges_.end(), from) - edges_.begin());
    k = k == 0 ? 0 : k - 1;
    for (; k < windows_.size() && edges_[k] < to; ++k) {
      const double lo = std::max(from, edges_[k]), hi = std::min(to, edges_[k + 1]);
      if (hi > lo) windows_[k].add(a, hi - lo);
    }
  }

  /// The hook refers to this accumulator, which must outlive the simulation.
  SojournHook<D> hook() {
    return [this](double from, double to, const Point<D>& x) { add(from, to, x); };
  }

  const std::vector<OccupationMeasure>& windows() const { return windows_; }
  OccupationMeasure pooled() const {
    OccupationMeasure all = windows_.front();
    for (std::size_t k = 1; k < windows_.size(); ++k) all.merge(windows_[k]);
    return all;
  }

 private:
  std::vector<CoordinateProjection> proj_;
  std::vector<double> edges_;
  std::vector<OccupationMeasure> windows_;
};

/// Empirical pmf: weights divided by the total weight.
DiscreteDist normalize(const OccupationMeasure& om);

/// Coordinates divided by N.
std::vector<std::vector<double>> scale_samples(std::span<const Atom> samples, double N);

template <std::size_t D>
std::vector<std::vector<double>> scaled_path(const Trajectory<D>& traj,
                                             std::span<const CoordinateProjection> proj,
                                             std::span<const double> grid, double N) {
  if (!(N > 0)) throw std::invalid_argument("scale must be > 0");
  std::vector<Atom> pts;
  for (const auto& g : sample_on_grid(traj, grid)) pts.push_back(project<D>(g.state, proj));
  return scale_samples(pts, N);
}

/// Projections of the full network state onto the regime's slow and fast
/// coordinates (see regime_slow_labels / regime_fast_labels).
std::vector<CoordinateProjection> slow_projection(Regime regime);
std::vector<CoordinateProjection> fast_projection(Regime regime, const ScalingConfig& sc);

}  // namespace seqnet
