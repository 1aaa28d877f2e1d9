#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "prosrs/problem.hpp"
#include "prosrs/random.hpp"

namespace prosrs {

using NodeId = std::size_t;

/// One domain of the refinement tree: its data, box, exploitation state and
/// zoom-out probability.
struct ZoomNode {
  NodeId id = 0;
  EvalDataset data;
  BoxDomain omega;
  ExploitState state;
  double beta = 0.0;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::size_t zoom_level = 0;
  std::size_t fail_counter = 0;
};

/// Occupied-cell count of a uniform ceil(n^(1/d))-per-axis grid over omega.
std::size_t effective_n(const EvalDataset& data, const BoxDomain& omega);

/// Smallest k with k^d >= n.
std::size_t cells_per_dimension(std::size_t n, std::size_t d);

/// Exploitation-state schedule for one iteration.
///
/// While p >= 0.1 only p decays, by n_eff^(-1/d). Afterwards consecutive
/// failed iterations are counted, and every c_fail of them halve sigma and
/// lower gamma by delta_gamma.
void update_state(ZoomNode& node, std::size_t n_eff, bool iteration_failed, const RunConfig& config);

/// True iff n^(-1/d) * len_i(child) < r * len_i(root) for every dimension i.
/// A node without data never triggers.
bool restart_condition(const ZoomNode& child, const BoxDomain& root_domain, const RunConfig& config);

/// ceil(log_rho r): no node ever sits deeper than this.
std::size_t max_zoom_level(double rho, double r);

/// Box of side rho * len_i centred at x, intersected with `parent`.
BoxDomain shrink_around(const BoxDomain& parent, std::span<const double> x, double rho);

/// Node arena plus the evaluation archive since the last restart.
class ZoomTree {
 public:
  /// Root node over `root_domain` holding `initial` (also seeds the archive).
  ZoomTree(BoxDomain root_domain, EvalDataset initial, const RunConfig& config);

  ZoomNode& current() { return nodes_[current_]; }
  const ZoomNode& current() const { return nodes_[current_]; }
  NodeId current_id() const { return current_; }
  const ZoomNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  const EvalDataset& archive() const { return archive_; }
  const BoxDomain& root_domain() const { return nodes_.front().omega; }

  /// Appends an evaluation to the current node and the archive.
  void record(const Point& x, double y);

  /// Would-be child for zooming in around x_star, without touching the tree.
  /// A revisited child comes back with refreshed data and halved beta; its
  /// id refers to the existing node. A new child gets id == size().
  ZoomNode plan_child(std::span<const double> x_star) const;

  /// Makes a planned child current and resets the parent's state.
  void commit_child(ZoomNode child);

  /// plan_child followed by commit_child.
  ZoomNode& zoom_in(std::span<const double> x_star);

  /// With probability current().beta moves to the parent and refreshes its
  /// data from the archive. Returns true when it moved.
  bool maybe_zoom_out(Rng& rng);

  std::size_t deepest_level() const { return deepest_; }

 private:
  RunConfig config_;
  std::vector<ZoomNode> nodes_;
  EvalDataset archive_;
  NodeId current_ = 0;
  std::size_t deepest_ = 0;
};

}  // namespace prosrs
