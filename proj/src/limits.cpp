#include "seqnet/limits.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace seqnet {

Vec OdeSolution::at(double t) const {
  if (times.empty()) throw std::logic_error("empty ODE solution");
  if (!(t >= 0.0) || t > horizon() * (1 + 1e-12) + 1e-15)
    throw std::out_of_range("time " + std::to_string(t) + " outside the ODE solution");
  if (times.size() == 1 || dt <= 0) return states.front();
  const double pos = std::min(t / dt, static_cast<double>(times.size() - 1));
  const std::size_t k = std::min(static_cast<std::size_t>(pos), times.size() - 2);
  const double w = pos - static_cast<double>(k);
  Vec out(states[k].size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1 - w) * states[k][i] + w * states[k + 1][i];
  return out;
}

std::vector<double> OdeSolution::component(std::size_t i) const {
  std::vector<double> c;
  c.reserve(states.size());
  for (const auto& x : states) c.push_back(x.at(i));
  return c;
}

void OdeSolution::write_csv(std::ostream& os, const std::function<double(double)>& production) const {
  os << 't';
  for (const auto& l : labels) os << ',' << l;
  if (production) os << ",production";
  os << '\n';
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < times.size(); ++k) {
    os << times[k];
    for (double v : states[k]) os << ',' << v;
    if (production) os << ',' << production(times[k]);
    os << '\n';
  }
  os.precision(old);
}

double default_dt(const KineticParams& p) { return 1e-3 / p.max_rate(); }

OdeSystem limiting_ode(Regime regime, const KineticParams& p, double C_M, double C_U,
                       bool regulated) {
  const Regime actual = classify_regime(p, C_M, C_U, regulated);
  if (actual != regime)
    throw std::invalid_argument("regime " + std::string(to_string(regime)) +
                                " does not match the parameters (classified as " +
                                std::string(to_string(actual)) + ")");
  OdeSystem sys;
  sys.regime = regime;
  switch (regime) {
    case Regime::Stable:
      sys.dim = 1;
      sys.labels = {"q"};
      sys.rhs = [p](double, const Vec& x) { return Vec{p.k_0Q - p.k_IL - p.k_Q0 * x[0]}; };
      sys.admissible = [](const Vec& x) { return x[0] >= 0.0; };
      break;
    case Regime::UnderLoaded:
      sys.dim = 1;
      sys.labels = {"l"};
      sys.rhs = [p](double, const Vec& x) { return Vec{p.k_IL * (1.0 - x[0]) - p.k_0Q}; };
      sys.admissible = [](const Vec& x) { return x[0] > 0.0 && x[0] < 1.0; };
      break;
    case Regime::OptimalSequestration:
      sys.dim = 2;
      sys.labels = {"s", "u"};
      sys.rhs = [p, C_M](double, const Vec& x) {
        const double s = x[0], u = x[1];
        const double feed = p.k_IL * (1.0 - s) + p.k_SR * s;
        const double ds = p.k_RS * u * feed / (p.k_RI * (C_M - 1.0 + s) + p.k_RS * u) - p.k_SR * s;
        return Vec{ds, p.k_IL * (1.0 - s) - p.k_0Q};
      };
      sys.admissible = [C_U](const Vec& x) {
        return x[0] >= 0.0 && x[0] < 1.0 && x[1] > 0.0 && x[1] < C_U;
      };
      break;
    case Regime::Saturation:
      sys.dim = 2;
      sys.labels = {"s", "l"};
      sys.rhs = [p, C_M, C_U](double, const Vec& x) {
        const double s = x[0], l = x[1];
        const double ds = p.k_RS * C_U * (p.k_0Q + p.k_SR * s) /
                              (p.k_RI * (C_M - 1.0 + s) + p.k_RS * C_U) -
                          p.k_SR * s;
        return Vec{ds, p.k_IL * (1.0 - l - s) - p.k_0Q};
      };
      sys.admissible = [](const Vec& x) { return x[0] >= 0.0 && x[1] > 0.0 && x[0] + x[1] < 1.0; };
      break;
    case Regime::Boundary:
      throw std::invalid_argument("no limiting ODE on a regime boundary");
  }
  return sys;
}

OdeSolution integrate(const OdeSystem& sys, const Vec& x0, double horizon, double dt) {
  if (x0.size() != sys.dim) throw std::invalid_argument("initial state has wrong dimension");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be >= 0");
  if (sys.admissible && !sys.admissible(x0))
    throw OdeError("initial state outside the admissible region");

  const auto n = static_cast<std::size_t>(std::max(0.0, std::ceil(horizon / dt - 1e-9)));
  const double h = n == 0 ? dt : horizon / static_cast<double>(n);
  OdeSolution sol;
  sol.dt = h;
  sol.labels = sys.labels;
  sol.regime = sys.regime;
  sol.times.reserve(n + 1);
  sol.states.reserve(n + 1);
  sol.times.push_back(0.0);
  sol.states.push_back(x0);

  const std::size_t d = sys.dim;
  Vec x = x0, tmp(d);
  auto axpy = [&](const Vec& base, const Vec& k, double c) {
    for (std::size_t i = 0; i < d; ++i) tmp[i] = base[i] + c * k[i];
    return tmp;
  };
  for (std::size_t step = 0; step < n; ++step) {
    const double t = static_cast<double>(step) * h;
    const Vec k1 = sys.rhs(t, x);
    const Vec k2 = sys.rhs(t + h / 2, axpy(x, k1, h / 2));
    const Vec k3 = sys.rhs(t + h / 2, axpy(x, k2, h / 2));
    const Vec k4 = sys.rhs(t + h, axpy(x, k3, h));
    Vec next(d);
    bool finite = true;
    for (std::size_t i = 0; i < d; ++i) {
      next[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      finite = finite && std::isfinite(next[i]);
    }
    const double t_next = static_cast<double>(step + 1) * h;
    if (!finite || (sys.admissible && !sys.admissible(next))) {
      sol.exited = true;
      sol.exit_time = t_next;
      break;
    }
    x = std::move(next);
    sol.times.push_back(t_next);
    sol.states.push_back(x);
  }
  return sol;
}

std::array<double, 3> p1_coefficients(const KineticParams& p, double C_M, double C_U) {
  const double a = p.k_RI * p.k_SR;
  return {a, (C_M - 1.0) * a, -C_U * p.k_0Q * p.k_RS};
}

double p1_value(const KineticParams& p, double C_M, double C_U, double s) {
  const auto c = p1_coefficients(p, C_M, C_U);
  return (c[0] * s + c[1]) * s + c[2];
}

Vec fixed_point(Regime regime, const KineticParams& p, double C_M, double C_U) {
  p.validate();
  switch (regime) {
    case Regime::Stable: return {(p.k_0Q - p.k_IL) / p.k_Q0};
    case Regime::UnderLoaded: return {1.0 - p.k_0Q / p.k_IL};
    case Regime::OptimalSequestration:
      return {1.0 - p.k_0Q / p.k_IL, sequestration_index(p, C_M)};
    case Regime::Saturation: {
      const auto c = p1_coefficients(p, C_M, C_U);
      // positive root of c2 s^2 + c1 s + c0, written to avoid cancellation
      const double s = -2.0 * c[2] / (c[1] + std::sqrt(c[1] * c[1] - 4.0 * c[0] * c[2]));
      return {s, 1.0 - s - p.k_0Q / p.k_IL};
    }
    case Regime::Boundary: break;
  }
  throw std::invalid_argument("no fixed point on a regime boundary");
}

std::array<double, 3> p3_coefficients(const KineticParams& p, double C_M) {
  const double k0 = p.k_0Q, kil = p.k_IL, kri = p.k_RI, ksr = p.k_SR, krs = p.k_RS;
  const double a2 = kri * (k0 * kil + ksr * (kil - k0)) * ((C_M - 1.0) * kil + kil - k0);
  const double a1 = (C_M - 1.0) * kil * kil * kil * kri * ksr + kil * kri * ksr * (kil * kil - k0 * k0);
  const double a0 = kil * kil * kil * krs * k0 * k0;
  return {a2, a1, a0};
}

StabilityReport stability_report(Regime regime, const KineticParams& p, double C_M, double C_U,
                                 bool regulated) {
  const OdeSystem sys = limiting_ode(regime, p, C_M, C_U, regulated);
  StabilityReport rep;
  rep.fixed_point = fixed_point(regime, p, C_M, C_U);
  if (sys.admissible && !sys.admissible(rep.fixed_point))
    throw OdeError("fixed point outside the admissible region");
  const std::size_t d = sys.dim;
  rep.jacobian.assign(d, Vec(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(rep.fixed_point[j]));
    Vec xp = rep.fixed_point, xm = rep.fixed_point;
    xp[j] += h;
    xm[j] -= h;
    const Vec fp = sys.rhs(0.0, xp), fm = sys.rhs(0.0, xm);
    for (std::size_t i = 0; i < d; ++i) rep.jacobian[i][j] = (fp[i] - fm[i]) / (2 * h);
  }
  if (d == 1) {
    rep.eigen_real = {rep.jacobian[0][0]};
    rep.eigen_imag = {0.0};
  } else {
    const auto& J = rep.jacobian;
    const double tr = J[0][0] + J[1][1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const double disc = tr * tr / 4 - det;
    if (disc >= 0) {
      const double r = std::sqrt(disc);
      rep.eigen_real = {tr / 2 + r, tr / 2 - r};
      rep.eigen_imag = {0.0, 0.0};
    } else {
      const double r = std::sqrt(-disc);
      rep.eigen_real = {tr / 2, tr / 2};
      rep.eigen_imag = {r, -r};
    }
  }
  rep.stable = std::all_of(rep.eigen_real.begin(), rep.eigen_real.end(), [](double v) { return v < 0; });
  if (regime == Regime::OptimalSequestration) {
    rep.p3 = p3_coefficients(p, C_M);
    rep.p3_positive = std::all_of(rep.p3->begin(), rep.p3->end(), [](double v) { return v > 0; });
  }
  return rep;
}

std::function<double(double)> production_limit(Regime regime, const KineticParams& p,
                                               const OdeSolution& sol) {
  if (sol.regime && *sol.regime != regime)
    throw std::invalid_argument("ODE solution belongs to regime " +
                                std::string(to_string(*sol.regime)));
  switch (regime) {
    case Regime::Stable: return [k = p.k_IL](double t) { return k * t; };
    case Regime::UnderLoaded:
    case Regime::Saturation: return [k = p.k_0Q](double t) { return k * t; };
    case Regime::OptimalSequestration: {
      if (sol.times.empty()) throw std::invalid_argument("empty ODE solution");
      auto cum = std::make_shared<std::vector<double>>(sol.times.size(), 0.0);
      auto rate = std::make_shared<std::vector<double>>();
      for (const auto& x : sol.states) rate->push_back(p.k_IL * (1.0 - x[0]));
      for (std::size_t k = 1; k < sol.times.size(); ++k)
        (*cum)[k] = (*cum)[k - 1] + 0.5 * sol.dt * ((*rate)[k - 1] + (*rate)[k]);
      const double dt = sol.dt, horizon = sol.horizon();
      return [cum, rate, dt, horizon](double t) {
        if (!(t >= 0.0) || t > horizon * (1 + 1e-12) + 1e-15)
          throw std::out_of_range("time outside the ODE solution");
        if (cum->size() == 1) return 0.0;
        const double pos = std::min(t / dt, static_cast<double>(cum->size() - 1));
        const std::size_t k = std::min(static_cast<std::size_t>(pos), cum->size() - 2);
        const double h = (pos - static_cast<double>(k)) * dt;
        const double r_end = (*rate)[k] + (h / dt) * ((*rate)[k + 1] - (*rate)[k]);
        return (*cum)[k] + 0.5 * h * ((*rate)[k] + r_end);
      };
    }
    case Regime::Boundary: break;
  }
  throw std::invalid_argument("no production limit on a regime boundary");
}

}  // namespace seqnet
