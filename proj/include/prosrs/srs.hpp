#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "prosrs/problem.hpp"
#include "prosrs/random.hpp"
#include "prosrs/surrogate.hpp"

namespace prosrs {

enum class CandidateType { TypeI, TypeII };

/// Candidate pool. Type I points (uniform on the node domain) come first,
/// followed by Type II points (Gaussian perturbations of the surrogate-best point).
struct CandidateSet {
  std::vector<Point> points;
  std::vector<CandidateType> types;

  std::size_t size() const { return points.size(); }
};

struct WeightPattern {
  std::vector<double> weights;
};

/// round(floor(10 p) / 10 * t).
std::size_t type_one_count(double p, std::size_t t);

/// Index of the data point with the lowest surrogate value, lowest index on ties.
std::size_t surrogate_best_index(const EvalDataset& data, const RbfSurrogate& model);

CandidateSet generate_candidates(const EvalDataset& data, const BoxDomain& omega,
                                 const ExploitState& state, const RbfSurrogate& model,
                                 std::size_t t, Rng& rng);

/// n_par >= 2: n_par equally spaced weights from 0.3 to 1.
/// n_par == 1: {0.3} on even iterations and {1.0} on odd ones.
WeightPattern weight_pattern(std::size_t n_par, std::size_t iteration_index);

/// Sequential weighted-score selection, one pick per weight.
///
/// For weight w the score of a remaining candidate is
///   w * (g - g_min) / (g_max - g_min) + (1 - w) * (D_max - D) / (D_max - D_min)
/// where g is its surrogate value, D its distance to the nearest of `evaluated`
/// plus the picks so far, and the ranges run over the remaining pool. A
/// degenerate range scores 0. The minimum-score candidate (lowest index on
/// ties) is picked and removed. Returns candidate indices in pick order.
std::vector<std::size_t> select_batch_indices(std::span<const double> surrogate_values,
                                              const std::vector<Point>& candidates,
                                              const std::vector<Point>& evaluated,
                                              const WeightPattern& pattern);

std::vector<Point> select_batch(const CandidateSet& candidates, const RbfSurrogate& model,
                                const std::vector<Point>& evaluated, const WeightPattern& pattern);

}  // namespace prosrs
