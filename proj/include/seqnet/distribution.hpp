#pragma once

// Probability mass functions on N^k stored as a sparse table of atoms, with
// a certified bound on the mass left outside the table.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace seqnet {

using Atom = std::vector<std::int64_t>;

/// Atoms below this probability are dropped from closed-form tables and
/// their mass is added to the tail bound.
inline constexpr double kPruneBelow = 1e-18;

class DiscreteDist {
 public:
  DiscreteDist() = default;
  /// `tail_bound` is an upper bound on the probability of the complement of
  /// the atoms. Throws if a weight is negative or an atom has the wrong size.
  DiscreteDist(std::size_t dimension, std::map<Atom, double> atoms, double tail_bound = 0.0);

  static DiscreteDist point_mass(const Atom& at);

  std::size_t dimension() const { return dim_; }
  const std::map<Atom, double>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double pmf(const Atom& x) const;
  double tail_bound() const { return tail_; }
  double table_mass() const { return mass_; }

  /// Closed-form moments when they were attached, table moments otherwise.
  std::vector<double> mean() const;
  std::vector<std::vector<double>> covariance() const;
  std::vector<double> table_mean() const;
  std::vector<std::vector<double>> table_covariance() const;
  DiscreteDist with_moments(std::vector<double> mean,
                            std::vector<std::vector<double>> covariance) const;

  /// Law of the listed coordinates.
  DiscreteDist marginal(const std::vector<std::size_t>& coords) const;

  /// n independent draws by inversion of the table CDF (renormalized to the
  /// table mass).
  std::vector<Atom> sample(std::size_t n, std::uint64_t seed) const;

  /// Columns: one per coordinate, then "probability".
  void write_csv(std::ostream& os, const std::vector<std::string>& labels = {}) const;

  /// Weighted mixture; weights are normalized. Tail bounds mix the same way.
  static DiscreteDist mixture(std::span<const DiscreteDist> parts, std::span<const double> weights);
  /// Law of independent components, concatenated in order.
  static DiscreteDist product(std::span<const DiscreteDist> factors);

 private:
  std::size_t dim_ = 0;
  std::map<Atom, double> atoms_;
  double tail_ = 0.0;
  double mass_ = 0.0;
  std::optional<std::vector<double>> mean_;
  std::optional<std::vector<std::vector<double>>> cov_;
};

double poisson_pmf(std::int64_t k, double mean);
/// mean + 12 sqrt(mean) + 30, floored.
std::int64_t poisson_truncation(double mean);
/// Chernoff bound on P(X > n) for X ~ Poisson(mean).
double poisson_tail_bound(double mean, std::int64_t n);

/// Poisson(mean) on {0..poisson_truncation(mean)}.
DiscreteDist poisson_dist(double mean);
DiscreteDist product_poisson(const std::vector<double>& means);

struct TvResult {
  double distance = 0.0;
  /// Sum of both tail bounds: the true distance is within this of `distance`.
  double tail_mass = 0.0;
};

/// Half the L1 distance over the union of the two tables.
TvResult tv_distance(const DiscreteDist& p, const DiscreteDist& q);

}  // namespace seqnet
