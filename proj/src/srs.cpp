#include "prosrs/srs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace prosrs {

std::size_t type_one_count(double p, std::size_t t) {
  const double fraction = std::floor(10.0 * p) / 10.0;
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(t)));
}

std::size_t surrogate_best_index(const EvalDataset& data, const RbfSurrogate& model) {
  if (data.empty()) throw InsufficientData("surrogate_best_index: empty data");
  std::size_t best = 0;
  double best_g = model.predict(data[0].x);
  for (std::size_t j = 1; j < data.size(); ++j) {
    const double g = model.predict(data[j].x);
    if (g < best_g) {
      best_g = g;
      best = j;
    }
  }
  return best;
}

CandidateSet generate_candidates(const EvalDataset& data, const BoxDomain& omega,
                                 const ExploitState& state, const RbfSurrogate& model,
                                 std::size_t t, Rng& rng) {
  const std::size_t d = omega.dimension();
  const Point& x_star = data[surrogate_best_index(data, model)].x;
  const std::size_t n_one = std::min(type_one_count(state.p, t), t);

  CandidateSet out;
  out.points.reserve(t);
  out.types.reserve(t);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t k = 0; k < n_one; ++k) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = omega.lower(i) + unif(rng) * omega.side_length(i);
    out.points.push_back(clip_to_domain(x, omega));
    out.types.push_back(CandidateType::TypeI);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = n_one; k < t; ++k) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = x_star[i] + state.sigma * omega.side_length(i) * gauss(rng);
    out.points.push_back(clip_to_domain(x, omega));
    out.types.push_back(CandidateType::TypeII);
  }
  return out;
}

WeightPattern weight_pattern(std::size_t n_par, std::size_t iteration_index) {
  if (n_par == 0) throw InvalidArgument("weight_pattern: n_par must be positive");
  if (n_par == 1) return {{iteration_index % 2 == 0 ? 0.3 : 1.0}};
  WeightPattern wp;
  wp.weights.resize(n_par);
  const double step = 0.7 / static_cast<double>(n_par - 1);
  for (std::size_t k = 0; k < n_par; ++k) wp.weights[k] = 0.3 + step * static_cast<double>(k);
  wp.weights.back() = 1.0;
  return wp;
}

std::vector<std::size_t> select_batch_indices(std::span<const double> surrogate_values,
                                              const std::vector<Point>& candidates,
                                              const std::vector<Point>& evaluated,
                                              const WeightPattern& pattern) {
  const std::size_t t = candidates.size();
  const std::size_t n_pick = pattern.weights.size();
  if (surrogate_values.size() != t) throw InvalidArgument("select_batch: one surrogate value per candidate");
  if (evaluated.empty()) throw InvalidArgument("select_batch: no evaluated points");
  if (t < n_pick) {
    throw InvalidArgument("select_batch: " + std::to_string(t) + " candidates for " +
                          std::to_string(n_pick) + " proposals");
  }

  std::vector<double> min_sq(t, std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < t; ++k) {
    for (const auto& e : evaluated) min_sq[k] = std::min(min_sq[k], squared_distance(candidates[k], e));
  }
  std::vector<char> taken(t, 0);
  std::vector<std::size_t> picks;
  picks.reserve(n_pick);

  for (const double w : pattern.weights) {
    double g_min = std::numeric_limits<double>::infinity(), g_max = -g_min;
    double d_min = g_min, d_max = -g_min;
    for (std::size_t k = 0; k < t; ++k) {
      if (taken[k]) continue;
      g_min = std::min(g_min, surrogate_values[k]);
      g_max = std::max(g_max, surrogate_values[k]);
      const double dk = std::sqrt(min_sq[k]);
      d_min = std::min(d_min, dk);
      d_max = std::max(d_max, dk);
    }
    const double g_range = g_max - g_min;
    const double d_range = d_max - d_min;
    std::size_t best = t;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t; ++k) {
      if (taken[k]) continue;
      const double vr = g_range > 0.0 ? (surrogate_values[k] - g_min) / g_range : 0.0;
      const double vd = d_range > 0.0 ? (d_max - std::sqrt(min_sq[k])) / d_range : 0.0;
      const double score = w * vr + (1.0 - w) * vd;
      if (score < best_score) {
        best_score = score;
        best = k;
      }
    }
    taken[best] = 1;
    picks.push_back(best);
    for (std::size_t k = 0; k < t; ++k) {
      if (!taken[k]) min_sq[k] = std::min(min_sq[k], squared_distance(candidates[k], candidates[best]));
    }
  }
  return picks;
}

std::vector<Point> select_batch(const CandidateSet& candidates, const RbfSurrogate& model,
                                const std::vector<Point>& evaluated, const WeightPattern& pattern) {
  const std::vector<double> g = model.predict(candidates.points);
  std::vector<Point> out;
  for (const std::size_t k : select_batch_indices(g, candidates.points, evaluated, pattern)) {
    out.push_back(candidates.points[k]);
  }
  return out;
}

}  // namespace prosrs
