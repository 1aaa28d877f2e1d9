#include "prosrs/doe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace prosrs {

double min_pairwise_distance(const std::vector<Point>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, squared_distance(points[i], points[j]));
    }
  }
  return std::isinf(best) ? best : std::sqrt(best);
}

DoeDesign latin_hypercube(std::size_t m, const BoxDomain& domain, Rng& rng) {
  if (m == 0) throw InvalidArgument("latin_hypercube: m must be positive");
  const std::size_t d = domain.dimension();
  DoeDesign design;
  design.points.assign(m, Point(d));
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < d; ++i) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double w = domain.side_length(i) / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
      design.points[k][i] = domain.lower(i) + (static_cast<double>(perm[k]) + 0.5) * w;
    }
  }
  design.criterion_value = min_pairwise_distance(design.points);
  return design;
}

DoeDesign latin_hypercube_maximin(std::size_t m, const BoxDomain& domain, std::size_t n_restarts,
                                  Rng& rng, std::vector<DoeDesign>* all_candidates) {
  if (n_restarts == 0) throw InvalidArgument("latin_hypercube_maximin: n_restarts must be positive");
  DoeDesign best;
  for (std::size_t k = 0; k < n_restarts; ++k) {
    DoeDesign cand = latin_hypercube(m, domain, rng);
    if (all_candidates) all_candidates->push_back(cand);
    if (k == 0 || cand.criterion_value > best.criterion_value) best = std::move(cand);
  }
  return best;
}

}  // namespace prosrs
