#include "mfront/elimination_tree.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace mfront {

namespace {

// Symbolic copy of `front` as seen by its parent: pivots eliminated at this
// node become computed.
Front advance(const Front& front) {
  Front next;
  next.front_id = front.front_id;
  next.local_to_global = front.local_to_global;
  next.membership_count = front.membership_count;
  next.computed = front.computed;
  for (Index k : eligible_pivots(front)) next.computed[k] = true;
  return next;
}

void recompute_membership(std::vector<TreeNode>& nodes,
                          const std::vector<NodeId>& level,
                          std::vector<int>& scratch) {
  for (NodeId id : level) {
    for (Index g : nodes[id].front.local_to_global) scratch[g]++;
  }
  for (NodeId id : level) {
    auto& front = nodes[id].front;
    for (Index k = 0; k < front.size(); ++k) {
      front.membership_count[k] = scratch[front.local_to_global[k]];
    }
  }
  for (NodeId id : level) {
    for (Index g : nodes[id].front.local_to_global) scratch[g] = 0;
  }
}

}  // namespace

std::vector<Front> sort_fronts(std::vector<Front> fronts) {
  std::stable_sort(fronts.begin(), fronts.end(),
                   [](const Front& a, const Front& b) {
                     return a.min_global() < b.min_global();
                   });
  return fronts;
}

Front join_fronts(const Front& left, const Front& right, JoinValues mode) {
  if (left.size() == 0 || right.size() == 0) {
    throw EmptyInputError("cannot join an empty front");
  }
  Front merged;
  merged.front_id = left.front_id;
  merged.local_to_global = left.local_to_global;
  merged.local_to_global.insert(merged.local_to_global.end(),
                                right.local_to_global.begin(),
                                right.local_to_global.end());
  std::sort(merged.local_to_global.begin(), merged.local_to_global.end());
  merged.local_to_global.erase(
      std::unique(merged.local_to_global.begin(), merged.local_to_global.end()),
      merged.local_to_global.end());

  const Index n = merged.size();
  merged.membership_count.assign(n, 0);
  merged.computed.assign(n, false);
  std::vector<Index> from_left(left.size());
  std::vector<Index> from_right(right.size());
  const auto position = [&](Index g) {
    return static_cast<Index>(std::lower_bound(merged.local_to_global.begin(),
                                               merged.local_to_global.end(), g) -
                              merged.local_to_global.begin());
  };
  for (Index k = 0; k < left.size(); ++k) {
    from_left[k] = position(left.local_to_global[k]);
  }
  for (Index k = 0; k < right.size(); ++k) {
    from_right[k] = position(right.local_to_global[k]);
  }
  std::vector<int> sources(n, 0);
  for (Index k = 0; k < left.size(); ++k) {
    const Index m = from_left[k];
    sources[m]++;
    merged.membership_count[m] = left.membership_count[k];
    merged.computed[m] = merged.computed[m] || left.computed[k];
  }
  for (Index k = 0; k < right.size(); ++k) {
    const Index m = from_right[k];
    sources[m]++;
    merged.membership_count[m] =
        std::max(merged.membership_count[m], right.membership_count[k]);
    merged.computed[m] = merged.computed[m] || right.computed[k];
  }
  for (Index m = 0; m < n; ++m) {
    // A shared index loses one holder when its two holders merge.
    if (sources[m] == 2) {
      merged.membership_count[m] = std::max(1, merged.membership_count[m] - 1);
    }
  }

  if (mode == JoinValues::Numeric) {
    if (left.is_symbolic() || right.is_symbolic()) {
      throw Error("numeric join requires numeric fronts");
    }
    merged.values = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < left.size(); ++i) {
      for (Index j = 0; j < left.size(); ++j) {
        merged.values(from_left[i], from_left[j]) += left.values(i, j);
      }
    }
    for (Index i = 0; i < right.size(); ++i) {
      for (Index j = 0; j < right.size(); ++j) {
        merged.values(from_right[i], from_right[j]) += right.values(i, j);
      }
    }
  }
  return merged;
}

std::vector<Index> eligible_pivots(const Front& front) {
  std::vector<Index> pivots;
  for (Index k = 0; k < front.size(); ++k) {
    if (front.membership_count[k] == 1 && !front.computed[k]) {
      pivots.push_back(k);
    }
  }
  std::sort(pivots.begin(), pivots.end(), [&](Index a, Index b) {
    return front.local_to_global[a] < front.local_to_global[b];
  });
  return pivots;
}

EliminationTree build_elimination_tree(std::vector<Front> fronts) {
  if (fronts.empty()) throw EmptyInputError("no fronts to build a tree from");
  Index max_index = 0;
  for (const auto& f : fronts) {
    if (f.size() == 0) throw EmptyInputError("front without indices");
    max_index = std::max(max_index, *std::max_element(f.local_to_global.begin(),
                                                      f.local_to_global.end()));
  }
  std::vector<int> scratch(static_cast<std::size_t>(max_index) + 1, 0);

  EliminationTree tree;
  auto& nodes = tree.nodes_;
  nodes.reserve(2 * fronts.size());
  std::vector<NodeId> current;
  for (auto& f : fronts) {
    TreeNode node;
    node.node_id = static_cast<NodeId>(nodes.size());
    node.level = 0;
    node.front = std::move(f);
    node.front.front_id = node.node_id;
    current.push_back(node.node_id);
    nodes.push_back(std::move(node));
  }
  recompute_membership(nodes, current, scratch);
  tree.levels_.push_back(current);

  int level = 0;
  while (current.size() > 1) {
    ++level;
    std::vector<NodeId> next;
    for (std::size_t i = 0; i < current.size(); i += 2) {
      TreeNode parent;
      parent.node_id = static_cast<NodeId>(nodes.size());
      parent.level = level;
      if (i + 1 < current.size()) {
        parent.front = join_fronts(advance(nodes[current[i]].front),
                                   advance(nodes[current[i + 1]].front),
                                   JoinValues::Symbolic);
        parent.children = {current[i], current[i + 1]};
      } else {
        parent.front = advance(nodes[current[i]].front);
        parent.children = {current[i]};
      }
      parent.front.front_id = parent.node_id;
      for (NodeId c : parent.children) nodes[c].parent = parent.node_id;
      next.push_back(parent.node_id);
      nodes.push_back(std::move(parent));
    }
    recompute_membership(nodes, next, scratch);
    tree.levels_.push_back(next);
    current = std::move(next);
  }
  tree.root_id_ = current.front();
  return tree;
}

std::string EliminationTree::to_dot() const {
  std::string out = "digraph elimination_tree {\n";
  for (const auto& n : nodes_) {
    out += fmt::format("  n{} [label=\"{}/{}/{}\"];\n", n.node_id, n.level,
                       n.node_id, n.front.size());
  }
  for (const auto& n : nodes_) {
    if (n.parent >= 0) out += fmt::format("  n{} -> n{};\n", n.node_id, n.parent);
  }
  out += "}\n";
  return out;
}

std::string EliminationTree::level_listing() const {
  std::string out;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    out += fmt::format("level {}:", l);
    for (NodeId id : levels_[l]) {
      const auto& n = nodes_[id];
      out += fmt::format(" {}[{}]{}", id, n.front.size(),
                         n.children.size() == 1 ? "*" : "");
    }
    out += "\n";
  }
  return out;
}

}  // namespace mfront
