#include "seqnet/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqnet/rng.hpp"

namespace seqnet {

DiscreteDist::DiscreteDist(std::size_t dimension, std::map<Atom, double> atoms, double tail_bound)
    : dim_(dimension), atoms_(std::move(atoms)), tail_(tail_bound) {
  if (dim_ == 0) throw std::invalid_argument("distribution dimension must be >= 1");
  if (!(tail_ >= 0.0)) throw std::invalid_argument("tail bound must be >= 0");
  for (const auto& [x, w] : atoms_) {
    if (x.size() != dim_) throw std::invalid_argument("atom has wrong dimension");
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("negative or non-finite weight");
    mass_ += w;
  }
}

DiscreteDist DiscreteDist::point_mass(const Atom& at) {
  return DiscreteDist(at.size(), {{at, 1.0}}, 0.0);
}

double DiscreteDist::pmf(const Atom& x) const {
  auto it = atoms_.find(x);
  return it == atoms_.end() ? 0.0 : it->second;
}

std::vector<double> DiscreteDist::table_mean() const {
  std::vector<double> m(dim_, 0.0);
  for (const auto& [x, w] : atoms_)
    for (std::size_t i = 0; i < dim_; ++i) m[i] += w * static_cast<double>(x[i]);
  if (mass_ > 0)
    for (double& v : m) v /= mass_;
  return m;
}

std::vector<std::vector<double>> DiscreteDist::table_covariance() const {
  const auto m = table_mean();
  std::vector<std::vector<double>> c(dim_, std::vector<double>(dim_, 0.0));
  for (const auto& [x, w] : atoms_)
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        c[i][j] += w * (static_cast<double>(x[i]) - m[i]) * (static_cast<double>(x[j]) - m[j]);
  if (mass_ > 0)
    for (auto& row : c)
      for (double& v : row) v /= mass_;
  return c;
}

std::vector<double> DiscreteDist::mean() const { return mean_ ? *mean_ : table_mean(); }

std::vector<std::vector<double>> DiscreteDist::covariance() const {
  return cov_ ? *cov_ : table_covariance();
}

DiscreteDist DiscreteDist::with_moments(std::vector<double> mean,
                                        std::vector<std::vector<double>> covariance) const {
  if (mean.size() != dim_ || covariance.size() != dim_)
    throw std::invalid_argument("moment dimension mismatch");
  DiscreteDist d = *this;
  d.mean_ = std::move(mean);
  d.cov_ = std::move(covariance);
  return d;
}

DiscreteDist DiscreteDist::marginal(const std::vector<std::size_t>& coords) const {
  if (coords.empty()) throw std::invalid_argument("marginal needs at least one coordinate");
  std::map<Atom, double> out;
  for (const auto& [x, w] : atoms_) {
    Atom y;
    y.reserve(coords.size());
    for (std::size_t c : coords) {
      if (c >= dim_) throw std::out_of_range("marginal coordinate out of range");
      y.push_back(x[c]);
    }
    out[y] += w;
  }
  return DiscreteDist(coords.size(), std::move(out), tail_);
}

std::vector<Atom> DiscreteDist::sample(std::size_t n, std::uint64_t seed) const {
  if (atoms_.empty()) throw std::logic_error("cannot sample from an empty table");
  std::vector<const Atom*> support;
  std::vector<double> cdf;
  support.reserve(atoms_.size());
  cdf.reserve(atoms_.size());
  double acc = 0.0;
  for (const auto& [x, w] : atoms_) {
    if (w <= 0) continue;
    acc += w;
    support.push_back(&x);
    cdf.push_back(acc);
  }
  Rng rng(seed);
  std::vector<Atom> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = rng.uniform_open() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
    out.push_back(*support[idx]);
  }
  return out;
}

void DiscreteDist::write_csv(std::ostream& os, const std::vector<std::string>& labels) const {
  for (std::size_t i = 0; i < dim_; ++i)
    os << (i < labels.size() ? labels[i] : "x" + std::to_string(i)) << ',';
  os << "probability\n";
  const auto old_prec = os.precision(17);
  for (const auto& [x, w] : atoms_) {
    for (auto v : x) os << v << ',';
    os << w << '\n';
  }
  os.precision(old_prec);
}

DiscreteDist DiscreteDist::mixture(std::span<const DiscreteDist> parts,
                                   std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size())
    throw std::invalid_argument("mixture needs matching, nonempty parts and weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture weight must be >= 0");
    total += w;
  }
  if (!(total > 0)) throw std::invalid_argument("mixture weights sum to zero");
  const std::size_t dim = parts.front().dimension();
  std::map<Atom, double> out;
  double tail = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].dimension() != dim) throw std::invalid_argument("mixture dimension mismatch");
    const double c = weights[i] / total;
    if (c == 0) continue;
    for (const auto& [x, w] : parts[i].atoms()) out[x] += c * w;
    tail += c * parts[i].tail_bound();
  }
  return DiscreteDist(dim, std::move(out), tail);
}

DiscreteDist DiscreteDist::product(std::span<const DiscreteDist> factors) {
  if (factors.empty()) throw std::invalid_argument("product of no factors");
  std::map<Atom, double> cur{{Atom{}, 1.0}};
  double tail = 0.0;
  std::size_t dim = 0;
  for (const auto& f : factors) {
    std::map<Atom, double> next;
    double pruned = 0.0;
    for (const auto& [x, wx] : cur)
      for (const auto& [y, wy] : f.atoms()) {
        const double w = wx * wy;
        if (w < kPruneBelow) {
          pruned += w;
          continue;
        }
        Atom z = x;
        z.insert(z.end(), y.begin(), y.end());
        next.emplace(std::move(z), w);
      }
    cur = std::move(next);
    tail += f.tail_bound() + pruned;
    dim += f.dimension();
  }
  std::vector<double> mean;
  std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
  std::size_t off = 0;
  for (const auto& f : factors) {
    const auto m = f.mean();
    const auto c = f.covariance();
    mean.insert(mean.end(), m.begin(), m.end());
    for (std::size_t i = 0; i < f.dimension(); ++i)
      for (std::size_t j = 0; j < f.dimension(); ++j) cov[off + i][off + j] = c[i][j];
    off += f.dimension();
  }
  return DiscreteDist(dim, std::move(cur), tail).with_moments(std::move(mean), std::move(cov));
}

double poisson_pmf(std::int64_t k, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be >= 0");
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

std::int64_t poisson_truncation(double mean) {
  return static_cast<std::int64_t>(std::floor(mean + 12.0 * std::sqrt(mean) + 30.0));
}

double poisson_tail_bound(double mean, std::int64_t n) {
  if (mean == 0.0) return 0.0;
  const double a = static_cast<double>(n + 1);
  if (a <= mean) return 1.0;
  // P(X >= a) <= exp(-mean) (e mean / a)^a
  return std::min(1.0, std::exp(-mean + a * (1.0 + std::log(mean) - std::log(a))));
}

DiscreteDist poisson_dist(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("Poisson mean must be finite and >= 0");
  if (mean == 0.0) return DiscreteDist::point_mass({0}).with_moments({0.0}, {{0.0}});
  const std::int64_t n = poisson_truncation(mean);
  std::map<Atom, double> atoms;
  double pruned = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    const double p = poisson_pmf(k, mean);
    if (p < kPruneBelow)
      pruned += p;
    else
      atoms.emplace(Atom{k}, p);
  }
  return DiscreteDist(1, std::move(atoms), poisson_tail_bound(mean, n) + pruned)
      .with_moments({mean}, {{mean}});
}

DiscreteDist product_poisson(const std::vector<double>& means) {
  std::vector<DiscreteDist> f;
  f.reserve(means.size());
  for (double m : means) f.push_back(poisson_dist(m));
  return DiscreteDist::product(f);
}

TvResult tv_distance(const DiscreteDist& p, const DiscreteDist& q) {
  if (p.dimension() != q.dimension()) throw std::invalid_argument("tv_distance: dimension mismatch");
  double sum = 0.0;
  auto a = p.atoms().begin(), ae = p.atoms().end();
  auto b = q.atoms().begin(), be = q.atoms().end();
  while (a != ae || b != be) {
    if (b == be || (a != ae && a->first < b->first)) {
      sum += a->second;
      ++a;
    } else if (a == ae || b->first < a->first) {
      sum += b->second;
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return {std::min(1.0, 0.5 * sum), p.tail_bound() + q.tail_bound()};
}

}  // namespace seqnet
