#include "seqnet/queues.hpp"

#include <cmath>
#include <stdexcept>

namespace seqnet {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

void require_open(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error("slow variables outside admissible region: " + what);
}

/// Truncated pmf table of Poisson(m) as a plain vector, plus its tail bound.
struct PoissonTable {
  std::vector<double> p;
  double tail = 0.0;
};

PoissonTable poisson_table(double m) {
  PoissonTable t;
  if (m == 0.0) {
    t.p = {1.0};
    return t;
  }
  const std::int64_t n = poisson_truncation(m);
  t.p.resize(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k) t.p[static_cast<std::size_t>(k)] = poisson_pmf(k, m);
  t.tail = poisson_tail_bound(m, n);
  return t;
}

template <std::size_t D>
Point<D> unit(std::size_t i, std::int64_t v = 1) {
  Point<D> p{};
  p[i] = v;
  return p;
}

}  // namespace

DiscreteDist mm_inf_invariant(double lambda, double mu) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  require_positive(mu, "mu");
  return poisson_dist(lambda / mu);
}

ChannelSet<1> mm_inf_channels(double lambda, double mu) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  require_positive(mu, "mu");
  ChannelSet<1> cs;
  cs.coordinate_names = {"x"};
  cs.channels.push_back({"arrival", {1}, [lambda](const Point<1>&) { return lambda; }});
  cs.channels.push_back(
      {"departure", {-1}, [mu](const Point<1>& x) { return mu * static_cast<double>(x[0]); }});
  return cs;
}

Trajectory<1> mm_inf_simulate(double lambda, double mu, std::int64_t x0, double horizon,
                              std::uint64_t seed, const SimulateOptions<1>& options) {
  return simulate(mm_inf_channels(lambda, mu), Point<1>{x0}, horizon, seed, options);
}

void FastInvRates::validate() const {
  require_positive(lambda, "lambda");
  require_positive(mu_R, "mu_R");
  require_positive(mu_L, "mu_L");
  require_positive(mu_U, "mu_U");
}

DiscreteDist fastinv_dist(const FastInvRates& r) {
  r.validate();
  const double mx = r.lambda / (r.mu_R + r.mu_U);
  const double my1 = r.lambda * r.mu_U / (r.mu_R * (r.mu_R + r.mu_U));
  const double my2 = r.lambda * r.mu_R / (r.mu_U * (r.mu_R + r.mu_U));
  const double mz = r.lambda / r.mu_L;
  const auto X = poisson_table(mx), Y1 = poisson_table(my1), Y2 = poisson_table(my2),
             Z = poisson_table(mz);

  // Joint law of (X + Y1, X + Y2) on a dense box, summed over the shared X.
  const std::size_t na = X.p.size() + Y1.p.size() - 1;
  const std::size_t nc = X.p.size() + Y2.p.size() - 1;
  std::vector<double> ac(na * nc, 0.0);
  double pruned = 0.0;
  for (std::size_t x = 0; x < X.p.size(); ++x)
    for (std::size_t y1 = 0; y1 < Y1.p.size(); ++y1) {
      const double w = X.p[x] * Y1.p[y1];
      if (w < kPruneBelow * kPruneBelow) {
        pruned += w;
        continue;
      }
      double* row = &ac[(x + y1) * nc + x];
      for (std::size_t y2 = 0; y2 < Y2.p.size(); ++y2) row[y2] += w * Y2.p[y2];
    }

  std::map<Atom, double> atoms;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t c = 0; c < nc; ++c) {
      const double wac = ac[a * nc + c];
      for (std::size_t z = 0; z < Z.p.size(); ++z) {
        const double w = wac * Z.p[z];
        if (w < kPruneBelow) {
          pruned += w;
          continue;
        }
        atoms.emplace(Atom{static_cast<std::int64_t>(a), static_cast<std::int64_t>(z),
                           static_cast<std::int64_t>(c)},
                      w);
      }
    }
  const double tail = X.tail + Y1.tail + Y2.tail + Z.tail + pruned;
  const std::vector<double> mean{r.lambda / r.mu_R, mz, r.lambda / r.mu_U};
  std::vector<std::vector<double>> cov{
      {mean[0], 0.0, mx}, {0.0, mz, 0.0}, {mx, 0.0, mean[2]}};
  return DiscreteDist(3, std::move(atoms), tail).with_moments(mean, cov);
}

ChannelSet<3> fastinv_ctmc_channels(const FastInvRates& r) {
  r.validate();
  using P = Point<3>;
  ChannelSet<3> cs;
  cs.coordinate_names = {"r", "l", "u"};
  cs.channels.push_back({"arrival", unit<3>(1), [l = r.lambda](const P&) { return l; }});
  cs.channels.push_back({"completion", {1, -1, 1}, [m = r.mu_L](const P& x) {
                           return m * static_cast<double>(x[1]);
                         }});
  cs.channels.push_back({"r_departure", unit<3>(0, -1), [m = r.mu_R](const P& x) {
                           return m * static_cast<double>(x[0]);
                         }});
  cs.channels.push_back({"u_departure", unit<3>(2, -1), [m = r.mu_U](const P& x) {
                           return m * static_cast<double>(x[2]);
                         }});
  return cs;
}

FastInvRates stable_fast_rates(const KineticParams& p, double C_M, double C_U, double q) {
  require_open(q > 0.0 && std::isfinite(q), "stable regime needs q > 0");
  return {p.k_IL, p.k_RI * (C_M - 1.0), p.k_LR * C_U, p.k_QU * q};
}

std::vector<std::string> regime_slow_labels(Regime regime) {
  switch (regime) {
    case Regime::Stable: return {"q"};
    case Regime::UnderLoaded: return {"l"};
    case Regime::OptimalSequestration: return {"s", "u"};
    case Regime::Saturation: return {"s", "l"};
    case Regime::Boundary: break;
  }
  throw std::invalid_argument("no limit description for the Boundary regime");
}

std::vector<std::string> regime_fast_labels(Regime regime) {
  switch (regime) {
    case Regime::Stable: return {"r", "l", "u"};
    case Regime::OptimalSequestration: return {"r", "l", "q"};
    case Regime::UnderLoaded:
    case Regime::Saturation: return {"r", "q", "U0-u"};
    case Regime::Boundary: break;
  }
  throw std::invalid_argument("no limit description for the Boundary regime");
}

namespace {

/// Means of the three independent Poisson coordinates for the product-form
/// regimes, in regime_fast_labels order.
std::vector<double> product_means(Regime regime, const KineticParams& p, double C_M, double C_U,
                                  std::span<const double> slow) {
  switch (regime) {
    case Regime::UnderLoaded: {
      const double l = slow[0];
      require_open(l > 0.0 && l < 1.0, "under-loaded regime needs 0 < l < 1");
      return {p.k_0Q / (p.k_RI * (C_M - 1.0)), p.k_0Q / (p.k_QU * C_U), p.k_0Q / (p.k_LR * l)};
    }
    case Regime::OptimalSequestration: {
      const double s = slow[0], u = slow[1];
      require_open(s >= 0.0 && s < 1.0 && u > 0.0 && u < C_U,
                   "optimal sequestration needs 0 <= s < 1 and 0 < u < C_U");
      const double in_l = p.k_IL * (1.0 - s);
      return {(in_l + p.k_SR * s) / (p.k_RI * (C_M - 1.0 + s) + p.k_RS * u),
              in_l / (p.k_LR * (C_U - u)), p.k_0Q / (p.k_QU * u)};
    }
    case Regime::Saturation: {
      const double s = slow[0], l = slow[1];
      require_open(s >= 0.0 && l > 0.0 && s + l < 1.0,
                   "saturation needs s >= 0, l > 0 and s + l < 1");
      return {(p.k_0Q + p.k_SR * s) / (p.k_RI * (C_M - 1.0 + s) + p.k_RS * C_U),
              p.k_0Q / (p.k_QU * C_U), p.k_0Q / (p.k_LR * l)};
    }
    default: break;
  }
  throw std::logic_error("not a product-form regime");
}

void check_slow(Regime regime, std::span<const double> slow) {
  const auto labels = regime_slow_labels(regime);
  if (slow.size() != labels.size())
    throw std::invalid_argument("regime " + std::string(to_string(regime)) + " expects " +
                                std::to_string(labels.size()) + " slow variables");
  for (double v : slow)
    if (!std::isfinite(v)) throw std::domain_error("non-finite slow variable");
}

}  // namespace

DiscreteDist regime_fast_dist(Regime regime, const KineticParams& p, double C_M, double C_U,
                              std::span<const double> slow) {
  p.validate();
  check_slow(regime, slow);
  if (regime == Regime::Stable) return fastinv_dist(stable_fast_rates(p, C_M, C_U, slow[0]));
  return product_poisson(product_means(regime, p, C_M, C_U, slow));
}

ChannelSet<3> regime_fast_channels(Regime regime, const KineticParams& p, double C_M, double C_U,
                                   std::span<const double> slow) {
  p.validate();
  check_slow(regime, slow);
  using P = Point<3>;
  auto X = [](const P& x, std::size_t i) { return static_cast<double>(x[i]); };
  ChannelSet<3> cs;
  const auto labels = regime_fast_labels(regime);
  cs.coordinate_names.assign(labels.begin(), labels.end());
  auto& ch = cs.channels;

  switch (regime) {
    case Regime::Stable: {
      cs.channels = fastinv_ctmc_channels(stable_fast_rates(p, C_M, C_U, slow[0])).channels;
      break;
    }
    case Regime::UnderLoaded:
    case Regime::Saturation: {
      // coordinates (r, q, v = U0 - u)
      const double l = regime == Regime::UnderLoaded ? slow[0] : slow[1];
      const double s = regime == Regime::UnderLoaded ? 0.0 : slow[0];
      product_means(regime, p, C_M, C_U, slow);  // region check
      const double r_out = p.k_RI * (C_M - 1.0 + s) + (regime == Regime::Saturation ? p.k_RS * C_U : 0.0);
      ch.push_back({"q_arrival", unit<3>(1), [k = p.k_0Q](const P&) { return k; }});
      ch.push_back({"uq_pairing", {0, -1, 1}, [k = p.k_QU * C_U, X](const P& x) { return k * X(x, 1); }});
      ch.push_back({"elongation_completion", {1, 0, -1},
                    [k = p.k_LR * l, X](const P& x) { return k * X(x, 2); }});
      if (regime == Regime::Saturation)
        ch.push_back({"release", unit<3>(0), [k = p.k_SR * s](const P&) { return k; }});
      ch.push_back({"r_departure", unit<3>(0, -1), [r_out, X](const P& x) { return r_out * X(x, 0); }});
      break;
    }
    case Regime::OptimalSequestration: {
      // coordinates (r, l, q)
      const double s = slow[0], u = slow[1];
      product_means(regime, p, C_M, C_U, slow);
      const double r_out = p.k_RS * u + p.k_RI * (C_M - 1.0 + s);
      ch.push_back({"initiation_to_elongation", unit<3>(1),
                    [k = p.k_IL * (1.0 - s)](const P&) { return k; }});
      ch.push_back({"elongation_completion", {1, -1, 0},
                    [k = p.k_LR * (C_U - u), X](const P& x) { return k * X(x, 1); }});
      ch.push_back({"release", unit<3>(0), [k = p.k_SR * s](const P&) { return k; }});
      ch.push_back({"r_departure", unit<3>(0, -1), [r_out, X](const P& x) { return r_out * X(x, 0); }});
      ch.push_back({"q_arrival", unit<3>(2), [k = p.k_0Q](const P&) { return k; }});
      ch.push_back({"uq_pairing", unit<3>(2, -1), [k = p.k_QU * u, X](const P& x) { return k * X(x, 2); }});
      break;
    }
    case Regime::Boundary: throw std::invalid_argument("no fast network for the Boundary regime");
  }
  return cs;
}

void CascadeRates::validate() const {
  require_positive(alpha, "alpha");
  require_positive(eta, "eta");
  if (!(beta >= alpha) || !std::isfinite(beta)) throw std::invalid_argument("cascade needs beta >= alpha");
}

DiscreteDist cascade_invariant(const CascadeRates& c, const KineticParams& p) {
  c.validate();
  p.validate();
  return product_poisson(
      {p.k_IL / (c.alpha * p.k_LR), c.beta * p.k_IL / (c.alpha * c.eta * p.k_QU)});
}

ChannelSet<2> cascade_channels(const CascadeRates& c, const KineticParams& p) {
  c.validate();
  p.validate();
  using P = Point<2>;
  ChannelSet<2> cs;
  cs.coordinate_names = {"x1", "x2"};
  cs.channels.push_back({"arrival", {1, 0}, [k = p.k_IL](const P&) { return k; }});
  cs.channels.push_back({"transfer", {-1, 1}, [k = p.k_LR * c.alpha](const P& x) {
                           return k * static_cast<double>(x[0]);
                         }});
  if (c.beta > c.alpha)
    cs.channels.push_back({"spawn", {0, 1}, [k = p.k_LR * (c.beta - c.alpha)](const P& x) {
                             return k * static_cast<double>(x[0]);
                           }});
  cs.channels.push_back({"departure", {0, -1}, [k = p.k_QU * c.eta](const P& x) {
                           return k * static_cast<double>(x[1]);
                         }});
  return cs;
}

}  // namespace seqnet
