#pragma once

#include <cstddef>
#include <vector>

#include "prosrs/problem.hpp"
#include "prosrs/random.hpp"

namespace prosrs {

struct DoeDesign {
  std::vector<Point> points;
  /// Minimum pairwise Euclidean distance; +inf for a single point.
  double criterion_value = 0.0;
};

double min_pairwise_distance(const std::vector<Point>& points);

/// Cell-centered Latin hypercube of m points.
DoeDesign latin_hypercube(std::size_t m, const BoxDomain& domain, Rng& rng);

/// Best of `n_restarts` cell-centered Latin hypercubes under the maximin
/// criterion. When `all_candidates` is non-null every generated design is
/// appended to it, in generation order.
DoeDesign latin_hypercube_maximin(std::size_t m, const BoxDomain& domain, std::size_t n_restarts,
                                  Rng& rng, std::vector<DoeDesign>* all_candidates = nullptr);

}  // namespace prosrs
