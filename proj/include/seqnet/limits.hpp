#pragma once

// Limiting ODEs of the scaled slow coordinates, fixed-step RK4, fixed points,
// local stability and the limiting production curves.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <vector>

#include "seqnet/model.hpp"

namespace seqnet {

using Vec = std::vector<double>;

struct OdeSystem {
  std::size_t dim = 0;
  std::vector<std::string> labels;
  std::function<Vec(double t, const Vec& x)> rhs;
  /// Open region the solution must stay in; empty means everywhere.
  std::function<bool(const Vec& x)> admissible;
  std::optional<Regime> regime;
};

class OdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdeSolution {
  std::vector<double> times;  // uniform, times[k] = k * dt
  std::vector<Vec> states;
  double dt = 0.0;
  std::string method = "rk4";
  std::vector<std::string> labels;
  std::optional<Regime> regime;
  /// Set when a step left the admissible region; the solution stops at the
  /// last admissible state and exit_time is the time of the failed step.
  bool exited = false;
  double exit_time = 0.0;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  /// Linear interpolation between grid points. Throws outside [0, horizon].
  Vec at(double t) const;
  std::vector<double> component(std::size_t i) const;
  void write_csv(std::ostream& os, const std::function<double(double)>& production = {}) const;
};

/// The regime's limiting ODE. Slow coordinates: Stable (q); UnderLoaded (l);
/// OptimalSequestration (s, u); Saturation (s, l). Throws if `regime` does
/// not match the classification of the parameters.
OdeSystem limiting_ode(Regime regime, const KineticParams& p, double C_M, double C_U,
                       bool regulated);

/// Fixed-step classical RK4. The step is horizon / ceil(horizon / dt).
OdeSolution integrate(const OdeSystem& sys, const Vec& x0, double horizon, double dt);

/// 1e-3 / (largest rate).
double default_dt(const KineticParams& p);

Vec fixed_point(Regime regime, const KineticParams& p, double C_M, double C_U);

/// Coefficients (a2, a1, a0) of the quadratic whose roots are the
/// eigenvalues of the linearized (s, u) system at its fixed point.
std::array<double, 3> p3_coefficients(const KineticParams& p, double C_M);

/// Coefficients (c2, c1, c0) of the saturation fixed-point quadratic in s:
/// k_RI k_SR s^2 + (C_M - 1) k_RI k_SR s - C_U k_0Q k_RS.
std::array<double, 3> p1_coefficients(const KineticParams& p, double C_M, double C_U);
double p1_value(const KineticParams& p, double C_M, double C_U, double s);

struct StabilityReport {
  Vec fixed_point;
  std::vector<Vec> jacobian;
  Vec eigen_real;
  Vec eigen_imag;
  bool stable = false;
  /// For OptimalSequestration only.
  std::optional<std::array<double, 3>> p3;
  bool p3_positive = false;
};

/// Central finite-difference Jacobian at the fixed point; eigenvalues from
/// trace and determinant.
StabilityReport stability_report(Regime regime, const KineticParams& p, double C_M, double C_U,
                                 bool regulated);

/// Limit of P_N(t)/N. For OptimalSequestration the integral of
/// k_IL (1 - s) is taken by the trapezoidal rule on the solution grid.
std::function<double(double)> production_limit(Regime regime, const KineticParams& p,
                                               const OdeSolution& sol);

}  // namespace seqnet
