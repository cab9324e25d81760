#pragma once

// The regulated translation network: species counts, mass-action channels
// and the classification of its asymptotic regimes.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seqnet/ctmc.hpp"

namespace seqnet {

/// The eight reaction rates. Bimolecular rates are per pair per unit time.
struct KineticParams {
  double k_RS = 1.0;  // R + U -> R_S + U   (sequestration)
  double k_SR = 1.0;  // R_S -> R           (release)
  double k_LR = 1.0;  // RM_L + UQ -> U + R + M + P
  double k_Q0 = 1.0;  // Q -> 0
  double k_0Q = 1.0;  // 0 -> Q, at rate k_0Q * N
  double k_RI = 1.0;  // R + M -> RM_I
  double k_IL = 1.0;  // RM_I -> RM_L
  double k_QU = 1.0;  // U + Q -> UQ

  /// Throws std::invalid_argument unless every rate is finite and > 0.
  void validate() const;
  KineticParams scaled(double factor) const;
  double max_rate() const;
};

/// Sizes of the particle pools. M0 and U0 are derived from C_M and C_U by
/// nearest-integer rounding unless given explicitly.
struct ScalingConfig {
  std::int64_t N = 0;
  std::int64_t M0 = 0;
  std::int64_t U0 = 0;
  double C_M = 0.0;
  double C_U = 0.0;

  static ScalingConfig from_ratios(std::int64_t N, double C_M, double C_U);
  /// Requires N >= 1, M0 >= N, U0 >= 1, C_M > 1, C_U > 0.
  void validate() const;
};

enum class Coord : std::size_t { S = 0, R = 1, L = 2, Q = 3, U = 4 };

/// (s, r, l, q, u): sequestered R, free R, RM_L, free Q, free U. The RM_I,
/// free-M and UQ counts are derived from the pool sizes and never stored.
struct NetState {
  std::int64_t s = 0;
  std::int64_t r = 0;
  std::int64_t l = 0;
  std::int64_t q = 0;
  std::int64_t u = 0;

  Point<5> point() const { return {s, r, l, q, u}; }
  static NetState from_point(const Point<5>& p) { return {p[0], p[1], p[2], p[3], p[4]}; }

  std::int64_t initiating(const ScalingConfig& sc) const { return sc.N - r - s - l; }
  std::int64_t free_m(const ScalingConfig& sc) const { return sc.M0 - (sc.N - r - s); }
  std::int64_t paired_u(const ScalingConfig& sc) const { return sc.U0 - u; }

  bool valid_for(const ScalingConfig& sc) const;
  bool operator==(const NetState&) const = default;
};

/// Channel names, in network order. The unregulated network has the same
/// order with "sequestration" and "release" removed.
inline constexpr std::string_view kChannelNames[] = {
    "q_arrival",          "q_degradation", "uq_pairing",         "elongation_completion",
    "sequestration",      "release",       "initiation_pairing", "initiation_to_elongation"};

struct Network {
  ChannelSet<5> channels;
  KineticParams params;
  ScalingConfig scaling;
  bool regulated = true;

  nlohmann::json metadata() const;
};

/// Default cap on the free-Q count, as a multiple of N.
inline constexpr std::int64_t kDefaultQCapPerN = 1'000'000;

Network build_network(const KineticParams& params, const ScalingConfig& scaling, bool regulated,
                      std::int64_t q_cap = 0);

enum class Regime {
  Stable,                // k_0Q > k_IL
  OptimalSequestration,  // k_0Q < k_IL, sequestration index < C_U
  Saturation,            // k_0Q < k_IL, sequestration index > C_U
  UnderLoaded,           // k_0Q < k_IL without regulation
  Boundary,              // one of the defining equalities holds
};

std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view name);

/// (k_SR/k_RS)(k_RI/k_0Q)(C_M - k_0Q/k_IL)(1 - k_0Q/k_IL). Compared with C_U
/// it separates optimal sequestration from saturation; when it is below C_U
/// it is also the limiting free-U fraction at equilibrium.
double sequestration_index(const KineticParams& p, double C_M);

inline constexpr double kBoundaryRelTol = 1e-12;

/// Regime of the regulated network.
Regime classify_regime(const KineticParams& p, double C_M, double C_U,
                       double rel_tol = kBoundaryRelTol);
Regime classify_regime(const KineticParams& p, double C_M, double C_U, bool regulated,
                       double rel_tol = kBoundaryRelTol);

KineticParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KineticParams& p);

}  // namespace seqnet
