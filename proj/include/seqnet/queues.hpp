#pragma once

// M/M/infinity building blocks and the invariant laws of the fast processes
// that appear in the scaling limits. The fast networks here run on the fast
// time scale: every rate of the full network divided by N, slow variables
// frozen at their limiting values.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqnet/ctmc.hpp"
#include "seqnet/distribution.hpp"
#include "seqnet/model.hpp"

namespace seqnet {

/// Poisson(lambda / mu).
DiscreteDist mm_inf_invariant(double lambda, double mu);
/// Birth at lambda, death at mu * x.
ChannelSet<1> mm_inf_channels(double lambda, double mu);
Trajectory<1> mm_inf_simulate(double lambda, double mu, std::int64_t x0, double horizon,
                              std::uint64_t seed, const SimulateOptions<1>& options = {});

struct FastInvRates {
  double lambda = 0.0;
  double mu_R = 0.0;
  double mu_L = 0.0;
  double mu_U = 0.0;
  void validate() const;
};

/// Law of (X + Y1, Z, X + Y2) with independent Poisson X, Y1, Y2, Z of means
/// lambda/(mu_R+mu_U), lambda mu_U/(mu_R(mu_R+mu_U)), lambda mu_R/(mu_U(mu_R+mu_U)),
/// lambda/mu_L. Coordinates are (R, L, U).
DiscreteDist fastinv_dist(const FastInvRates& r);
/// Arrival +e_L at lambda; completion +e_R+e_U-e_L at mu_L x_L; departures of
/// R and U at mu_R x_R and mu_U x_U.
ChannelSet<3> fastinv_ctmc_channels(const FastInvRates& r);

/// Fast rates of the stable regime with free-Q fraction q.
FastInvRates stable_fast_rates(const KineticParams& p, double C_M, double C_U, double q);

/// Slow variables each regime's fast law depends on, in order.
/// Stable: (q); UnderLoaded: (l); OptimalSequestration: (s, u); Saturation: (s, l).
std::vector<std::string> regime_slow_labels(Regime regime);
/// Fast coordinates. Stable: (r, l, u); OptimalSequestration: (r, l, q);
/// UnderLoaded and Saturation: (r, q, U0-u).
std::vector<std::string> regime_fast_labels(Regime regime);

/// Invariant law of the fast process at the given slow variables. Throws
/// std::domain_error outside the regime's open admissible region.
DiscreteDist regime_fast_dist(Regime regime, const KineticParams& p, double C_M, double C_U,
                              std::span<const double> slow);
/// The fast network with slow variables frozen, coordinates as in
/// regime_fast_labels.
ChannelSet<3> regime_fast_channels(Regime regime, const KineticParams& p, double C_M, double C_U,
                                   std::span<const double> slow);

struct CascadeRates {
  double alpha = 1.0;
  double beta = 1.0;
  double eta = 1.0;
  void validate() const;
};

/// Product of Poisson(k_IL/(alpha k_LR)) and Poisson(beta k_IL/(alpha eta k_QU)).
/// The first factor is the exact first marginal and the second has the
/// exact second-marginal mean. The product is the exact stationary law only
/// when alpha == beta; for alpha < beta the coordinates are correlated.
DiscreteDist cascade_invariant(const CascadeRates& c, const KineticParams& p);
/// +e1 at k_IL; e2-e1 at k_LR alpha x1; +e2 at k_LR (beta-alpha) x1;
/// -e2 at k_QU eta x2.
ChannelSet<2> cascade_channels(const CascadeRates& c, const KineticParams& p);

}  // namespace seqnet
