#include "seqnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqnet {

namespace {

void require_rate(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("rate ") + name + " must be finite and > 0");
}

bool near(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void KineticParams::validate() const {
  require_rate(k_RS, "k_RS");
  require_rate(k_SR, "k_SR");
  require_rate(k_LR, "k_LR");
  require_rate(k_Q0, "k_Q0");
  require_rate(k_0Q, "k_0Q");
  require_rate(k_RI, "k_RI");
  require_rate(k_IL, "k_IL");
  require_rate(k_QU, "k_QU");
}

KineticParams KineticParams::scaled(double c) const {
  return {k_RS * c, k_SR * c, k_LR * c, k_Q0 * c, k_0Q * c, k_RI * c, k_IL * c, k_QU * c};
}

double KineticParams::max_rate() const {
  return std::max({k_RS, k_SR, k_LR, k_Q0, k_0Q, k_RI, k_IL, k_QU});
}

ScalingConfig ScalingConfig::from_ratios(std::int64_t N, double C_M, double C_U) {
  ScalingConfig sc;
  sc.N = N;
  sc.C_M = C_M;
  sc.C_U = C_U;
  sc.M0 = static_cast<std::int64_t>(std::llround(C_M * static_cast<double>(N)));
  sc.U0 = static_cast<std::int64_t>(std::llround(C_U * static_cast<double>(N)));
  sc.validate();
  return sc;
}

void ScalingConfig::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(C_M > 1.0) || !std::isfinite(C_M)) throw std::invalid_argument("C_M must be > 1");
  if (!(C_U > 0.0) || !std::isfinite(C_U)) throw std::invalid_argument("C_U must be > 0");
  if (M0 < N) throw std::invalid_argument("M0 must be >= N");
  if (U0 < 1) throw std::invalid_argument("U0 must be >= 1");
}

bool NetState::valid_for(const ScalingConfig& sc) const {
  return s >= 0 && r >= 0 && l >= 0 && q >= 0 && u >= 0 && s + r + l <= sc.N && u <= sc.U0 &&
         free_m(sc) >= 0;
}

nlohmann::json Network::metadata() const {
  return {{"params", to_json(params)},
          {"N", scaling.N},
          {"M0", scaling.M0},
          {"U0", scaling.U0},
          {"C_M", scaling.C_M},
          {"C_U", scaling.C_U},
          {"rounding", "nearest"},
          {"regulated", regulated},
          {"q_cap", channels.hard_cap[static_cast<std::size_t>(Coord::Q)]}};
}

Network build_network(const KineticParams& p, const ScalingConfig& sc, bool regulated,
                      std::int64_t q_cap) {
  p.validate();
  sc.validate();
  const double N = static_cast<double>(sc.N);
  const double M0 = static_cast<double>(sc.M0);
  const double U0 = static_cast<double>(sc.U0);

  // Propensities read the state as doubles: the products below are bounded
  // by the caps and exact far beyond any realistic count.
  using P = Point<5>;
  auto S = [](const P& x) { return static_cast<double>(x[0]); };
  auto R = [](const P& x) { return static_cast<double>(x[1]); };
  auto L = [](const P& x) { return static_cast<double>(x[2]); };
  auto Q = [](const P& x) { return static_cast<double>(x[3]); };
  auto U = [](const P& x) { return static_cast<double>(x[4]); };

  std::vector<Channel<5>> ch;
  ch.push_back({"q_arrival", {0, 0, 0, 1, 0}, [k = p.k_0Q, N](const P&) { return k * N; }});
  ch.push_back({"q_degradation", {0, 0, 0, -1, 0}, [k = p.k_Q0, Q](const P& x) { return k * Q(x); }});
  ch.push_back({"uq_pairing", {0, 0, 0, -1, -1},
                [k = p.k_QU, Q, U](const P& x) { return k * U(x) * Q(x); }});
  ch.push_back({"elongation_completion", {0, 1, -1, 0, 1},
                [k = p.k_LR, U0, L, U](const P& x) { return k * (U0 - U(x)) * L(x); }, true});
  if (regulated) {
    ch.push_back({"sequestration", {1, -1, 0, 0, 0},
                  [k = p.k_RS, R, U](const P& x) { return k * R(x) * U(x); }});
    ch.push_back({"release", {-1, 1, 0, 0, 0}, [k = p.k_SR, S](const P& x) { return k * S(x); }});
  }
  ch.push_back({"initiation_pairing", {0, -1, 0, 0, 0},
                [k = p.k_RI, M0, N, R, S](const P& x) {
                  return k * (M0 - (N - R(x) - S(x))) * R(x);
                }});
  ch.push_back({"initiation_to_elongation", {0, 0, 1, 0, 0},
                [k = p.k_IL, N, R, S, L](const P& x) { return k * (N - R(x) - S(x) - L(x)); }});

  Network net;
  net.params = p;
  net.scaling = sc;
  net.regulated = regulated;
  net.channels.channels = std::move(ch);
  net.channels.coordinate_names = {"s", "r", "l", "q", "u"};
  net.channels.admissible = [sc, regulated](const P& x) {
    const NetState st = NetState::from_point(x);
    return st.valid_for(sc) && (regulated || st.s == 0);
  };
  if (q_cap <= 0) q_cap = kDefaultQCapPerN * sc.N;
  net.channels.hard_cap[static_cast<std::size_t>(Coord::Q)] = q_cap;
  return net;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Stable: return "Stable";
    case Regime::OptimalSequestration: return "OptimalSequestration";
    case Regime::Saturation: return "Saturation";
    case Regime::UnderLoaded: return "UnderLoaded";
    case Regime::Boundary: return "Boundary";
  }
  return "?";
}

Regime regime_from_string(std::string_view name) {
  for (Regime r : {Regime::Stable, Regime::OptimalSequestration, Regime::Saturation,
                   Regime::UnderLoaded, Regime::Boundary})
    if (to_string(r) == name) return r;
  throw std::invalid_argument("unknown regime '" + std::string(name) + "'");
}

double sequestration_index(const KineticParams& p, double C_M) {
  const double rho = p.k_0Q / p.k_IL;
  return (p.k_SR / p.k_RS) * (p.k_RI / p.k_0Q) * (C_M - rho) * (1.0 - rho);
}

Regime classify_regime(const KineticParams& p, double C_M, double C_U, double rel_tol) {
  return classify_regime(p, C_M, C_U, true, rel_tol);
}

Regime classify_regime(const KineticParams& p, double C_M, double C_U, bool regulated,
                       double rel_tol) {
  p.validate();
  if (!(C_M > 1.0)) throw std::invalid_argument("C_M must be > 1");
  if (!(C_U > 0.0)) throw std::invalid_argument("C_U must be > 0");
  if (near(p.k_0Q, p.k_IL, rel_tol)) return Regime::Boundary;
  if (p.k_0Q > p.k_IL) return Regime::Stable;
  if (!regulated) return Regime::UnderLoaded;
  const double phi = sequestration_index(p, C_M);
  if (near(phi, C_U, rel_tol)) return Regime::Boundary;
  return phi < C_U ? Regime::OptimalSequestration : Regime::Saturation;
}

KineticParams params_from_json(const nlohmann::json& j) {
  KineticParams p;
  p.k_RS = j.at("k_RS").get<double>();
  p.k_SR = j.at("k_SR").get<double>();
  p.k_LR = j.at("k_LR").get<double>();
  p.k_Q0 = j.at("k_Q0").get<double>();
  p.k_0Q = j.at("k_0Q").get<double>();
  p.k_RI = j.at("k_RI").get<double>();
  p.k_IL = j.at("k_IL").get<double>();
  p.k_QU = j.at("k_QU").get<double>();
  p.validate();
  return p;
}

nlohmann::json to_json(const KineticParams& p) {
  return {{"k_RS", p.k_RS}, {"k_SR", p.k_SR}, {"k_LR", p.k_LR}, {"k_Q0", p.k_Q0},
          {"k_0Q", p.k_0Q}, {"k_RI", p.k_RI}, {"k_IL", p.k_IL}, {"k_QU", p.k_QU}};
}

}  // namespace seqnet
