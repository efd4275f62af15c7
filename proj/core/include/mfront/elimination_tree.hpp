#pragma once

#include <string>
#include <vector>

#include "mfront/fem.hpp"

namespace mfront {

using NodeId = Index;

struct TreeNode {
  NodeId node_id = 0;
  int level = 0;
  Front front;
  std::vector<NodeId> children;
  NodeId parent = -1;
};

/// Balanced binary assembly tree. Leaves hold the elemental fronts, inner
/// nodes hold symbolic merged fronts, and the root covers every DOF.
class EliminationTree {
 public:
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  NodeId root_id() const { return root_id_; }
  /// Node ids grouped by level, leaves first.
  const std::vector<std::vector<NodeId>>& levels() const { return levels_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  std::size_t leaf_count() const {
    return levels_.empty() ? 0 : levels_.front().size();
  }

  /// One node per TreeNode labelled "level/node_id/size", edges child->parent.
  std::string to_dot() const;
  /// "level L: id[size] ..." lines; one-child nodes carry a trailing '*'.
  std::string level_listing() const;

 private:
  friend EliminationTree build_elimination_tree(std::vector<Front> fronts);

  std::vector<TreeNode> nodes_;
  NodeId root_id_ = -1;
  std::vector<std::vector<NodeId>> levels_;
};

/// Stable ascending sort by minimum global index.
std::vector<Front> sort_fronts(std::vector<Front> fronts);

enum class JoinValues { Numeric, Symbolic };

/// Merges two fronts of one level over the union of their global indices
/// (ascending). Numeric joins sum overlapping entries; symbolic joins leave
/// `values` empty.
///
/// Membership counts are estimated from the two sources alone; the tree
/// builder recomputes them against the whole new level.
Front join_fronts(const Front& left, const Front& right,
                  JoinValues mode = JoinValues::Numeric);

/// Local indices that may be eliminated in `front` now: fully summed
/// (membership 1) and not eliminated at a lower level.
std::vector<Index> eligible_pivots(const Front& front);

EliminationTree build_elimination_tree(std::vector<Front> fronts);

}  // namespace mfront
