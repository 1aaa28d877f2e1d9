#include "prosrs/zoomtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace prosrs {

std::size_t cells_per_dimension(std::size_t n, std::size_t d) {
  if (n <= 1) return 1;
  std::size_t k = 1;
  while (true) {
    // k^d >= n, with saturation instead of overflow.
    long double power = 1.0L;
    for (std::size_t i = 0; i < d && power < static_cast<long double>(n); ++i) power *= k;
    if (power >= static_cast<long double>(n)) return k;
    ++k;
  }
}

std::size_t effective_n(const EvalDataset& data, const BoxDomain& omega) {
  if (data.empty()) return 0;
  const std::size_t d = omega.dimension();
  const std::size_t k = cells_per_dimension(data.size(), d);
  std::set<std::vector<std::size_t>> occupied;
  std::vector<std::size_t> cell(d);
  for (const auto& r : data) {
    for (std::size_t i = 0; i < d; ++i) {
      const double t = (r.x[i] - omega.lower(i)) / omega.side_length(i) * static_cast<double>(k);
      const double idx = std::clamp(std::floor(t), 0.0, static_cast<double>(k - 1));
      cell[i] = static_cast<std::size_t>(idx);
    }
    occupied.insert(cell);
  }
  return occupied.size();
}

void update_state(ZoomNode& node, std::size_t n_eff, bool iteration_failed, const RunConfig& config) {
  if (n_eff == 0) throw InvalidArgument("update_state: n_eff must be positive");
  ExploitState& s = node.state;
  if (s.p >= 0.1) {
    const double d = static_cast<double>(node.omega.dimension());
    s.p *= std::pow(static_cast<double>(n_eff), -1.0 / d);
    return;
  }
  node.fail_counter = iteration_failed ? node.fail_counter + 1 : 0;
  if (node.fail_counter >= config.c_fail) {
    node.fail_counter = 0;
    s.sigma /= 2.0;
    s.gamma -= config.delta_gamma;
  }
}

bool restart_condition(const ZoomNode& child, const BoxDomain& root_domain, const RunConfig& config) {
  const std::size_t n = child.data.size();
  if (n == 0) return false;
  const std::size_t d = child.omega.dimension();
  const double shrink = std::pow(static_cast<double>(n), -1.0 / static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!(shrink * child.omega.side_length(i) < config.r_resolution * root_domain.side_length(i))) {
      return false;
    }
  }
  return true;
}

std::size_t max_zoom_level(double rho, double r) {
  const double z = std::log(r) / std::log(rho);
  return static_cast<std::size_t>(std::ceil(z - 1e-12));
}

BoxDomain shrink_around(const BoxDomain& parent, std::span<const double> x, double rho) {
  const std::size_t d = parent.dimension();
  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double half = 0.5 * rho * parent.side_length(i);
    lo[i] = std::max(x[i] - half, parent.lower(i));
    hi[i] = std::min(x[i] + half, parent.upper(i));
  }
  return BoxDomain(std::move(lo), std::move(hi));
}

ZoomTree::ZoomTree(BoxDomain root_domain, EvalDataset initial, const RunConfig& config)
    : config_(config), archive_(initial) {
  ZoomNode root{.id = 0,
                .data = std::move(initial),
                .omega = std::move(root_domain),
                .state = config.s_init,
                .beta = config.beta_init,
                .parent = std::nullopt,
                .children = {}};
  nodes_.push_back(std::move(root));
}

void ZoomTree::record(const Point& x, double y) {
  current().data.add(x, y);
  archive_.add(x, y);
}

ZoomNode ZoomTree::plan_child(std::span<const double> x_star) const {
  const ZoomNode& parent = current();
  if (!parent.omega.contains(x_star)) throw InvalidArgument("zoom_in: x_star outside the current domain");

  std::optional<NodeId> chosen;
  double chosen_dist = std::numeric_limits<double>::infinity();
  for (const NodeId c : parent.children) {
    const ZoomNode& child = nodes_[c];
    if (!child.omega.contains(x_star)) continue;
    const double dist = distance(child.omega.center(), x_star);
    if (dist < chosen_dist) {
      chosen_dist = dist;
      chosen = c;
    }
  }
  if (chosen) {
    ZoomNode revisit = nodes_[*chosen];
    revisit.data = archive_.restricted_to(revisit.omega);
    revisit.beta = std::max(revisit.beta / 2.0, config_.beta_min);
    return revisit;
  }
  BoxDomain omega = shrink_around(parent.omega, x_star, config_.rho);
  EvalDataset data = archive_.restricted_to(omega);
  return ZoomNode{.id = nodes_.size(),
                  .data = std::move(data),
                  .omega = std::move(omega),
                  .state = config_.s_init,
                  .beta = config_.beta_init,
                  .parent = current_,
                  .children = {},
                  .zoom_level = parent.zoom_level + 1,
                  .fail_counter = 0};
}

void ZoomTree::commit_child(ZoomNode child) {
  if (child.parent != current_) throw InvalidArgument("commit_child: child does not belong to the current node");
  ZoomNode& parent = current();
  parent.state = config_.s_init;
  parent.fail_counter = 0;
  const NodeId id = child.id;
  deepest_ = std::max(deepest_, child.zoom_level);
  if (id < nodes_.size()) {
    nodes_[id] = std::move(child);
  } else if (id == nodes_.size()) {
    parent.children.push_back(id);
    nodes_.push_back(std::move(child));
  } else {
    throw InvalidArgument("commit_child: unknown node id");
  }
  current_ = id;
}

ZoomNode& ZoomTree::zoom_in(std::span<const double> x_star) {
  commit_child(plan_child(x_star));
  return current();
}

bool ZoomTree::maybe_zoom_out(Rng& rng) {
  const ZoomNode& node = current();
  if (!node.parent) return false;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (!(unif(rng) < node.beta)) return false;
  current_ = *node.parent;
  ZoomNode& parent = current();
  parent.data = archive_.restricted_to(parent.omega);
  return true;
}

}  // namespace prosrs
