#include "seqnet/measures.hpp"

#include <algorithm>

namespace seqnet {

std::vector<CoordinateProjection> identity_projection(std::size_t dim,
                                                      const std::vector<std::string>& labels) {
  std::vector<CoordinateProjection> out;
  for (std::size_t i = 0; i < dim; ++i)
    out.push_back({i, 0, 1, i < labels.size() ? labels[i] : "x" + std::to_string(i)});
  return out;
}

double OccupationMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& [a, w] : weights) s += w;
  return s;
}

void OccupationMeasure::merge(const OccupationMeasure& other) {
  if (other.labels != labels && !labels.empty())
    throw std::invalid_argument("merging occupation measures over different coordinates");
  if (labels.empty()) labels = other.labels;
  for (const auto& [a, w] : other.weights) weights[a] += w;
  if (other.t0 == t1) {
    t1 = other.t1;
  } else if (other.t1 == t0) {
    t0 = other.t0;
  } else {
    t1 += other.length();
  }
}

void OccupationMeasure::write_csv(std::ostream& os) const {
  for (const auto& l : labels) os << l << ',';
  os << "sojourn_time,probability\n";
  const double tot = total_weight();
  const auto old = os.precision(17);
  for (const auto& [a, w] : weights) {
    for (auto v : a) os << v << ',';
    os << w << ',' << (tot > 0 ? w / tot : 0.0) << '\n';
  }
  os.precision(old);
}

DiscreteDist normalize(const OccupationMeasure& om) {
  const double tot = om.total_weight();
  if (!(om.length() > 0.0) || !(tot > 0.0))
    throw std::invalid_argument("cannot normalize an occupation measure of zero length");
  std::map<Atom, double> atoms;
  for (const auto& [a, w] : om.weights) atoms.emplace(a, w / tot);
  const std::size_t dim = om.labels.empty() ? om.weights.begin()->first.size() : om.labels.size();
  return DiscreteDist(dim, std::move(atoms), 0.0);
}

std::vector<std::vector<double>> scale_samples(std::span<const Atom> samples, double N) {
  std::vector<std::vector<double>> out;
  out.reserve(samples.size());
  for (const auto& a : samples) {
    std::vector<double> v(a.size());
    std::transform(a.begin(), a.end(), v.begin(),
                   [N](std::int64_t x) { return static_cast<double>(x) / N; });
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<CoordinateProjection> slow_projection(Regime regime) {
  switch (regime) {
    case Regime::Stable: return {{3, 0, 1, "q"}};
    case Regime::UnderLoaded: return {{2, 0, 1, "l"}};
    case Regime::OptimalSequestration: return {{0, 0, 1, "s"}, {4, 0, 1, "u"}};
    case Regime::Saturation: return {{0, 0, 1, "s"}, {2, 0, 1, "l"}};
    case Regime::Boundary: break;
  }
  throw std::invalid_argument("no slow coordinates for the Boundary regime");
}

std::vector<CoordinateProjection> fast_projection(Regime regime, const ScalingConfig& sc) {
  switch (regime) {
    case Regime::Stable: return {{1, 0, 1, "r"}, {2, 0, 1, "l"}, {4, 0, 1, "u"}};
    case Regime::OptimalSequestration: return {{1, 0, 1, "r"}, {2, 0, 1, "l"}, {3, 0, 1, "q"}};
    case Regime::UnderLoaded:
    case Regime::Saturation: return {{1, 0, 1, "r"}, {3, 0, 1, "q"}, {4, sc.U0, -1, "U0-u"}};
    case Regime::Boundary: break;
  }
  throw std::invalid_argument("no fast coordinates for the Boundary regime");
}

}  // namespace seqnet
