#pragma once

#include <array>
#include <compare>
#include <span>
#include <string>
#include <vector>

#include "mfront/elimination_tree.hpp"

namespace mfront {

/// Numbered like the four task symbols T1..T4.
enum class TaskKind : std::uint8_t {
  Division = 1,
  Multiplication = 2,
  Subtraction = 3,
  Assertion = 4,
};

inline constexpr std::array<TaskKind, 4> kAllTaskKinds = {
    TaskKind::Division, TaskKind::Multiplication, TaskKind::Subtraction,
    TaskKind::Assertion};

std::string_view to_string(TaskKind kind);
inline int kind_index(TaskKind kind) { return static_cast<int>(kind) - 1; }

/// One atomic factorization task. Indices are global DOF numbers; `front`
/// and `pivot` are -1 for assertions. Divisions carry row == pivot.
struct Task {
  TaskKind kind = TaskKind::Assertion;
  Index front = -1;
  Index pivot = -1;
  Index row = -1;
  Index col = -1;

  friend auto operator<=>(const Task&, const Task&) = default;

  static Task division(Index f, Index z, Index y) {
    return {TaskKind::Division, f, z, z, y};
  }
  static Task multiplication(Index f, Index z, Index x, Index y) {
    return {TaskKind::Multiplication, f, z, x, y};
  }
  static Task subtraction(Index f, Index z, Index x, Index y) {
    return {TaskKind::Subtraction, f, z, x, y};
  }
  static Task assertion(Index x, Index y) {
    return {TaskKind::Assertion, -1, -1, x, y};
  }
};

/// "T{kind};f={f};z,x,y", or "T4;x,y" for assertions.
std::string to_label(const Task& task);

/// Symmetric nonzero pattern in compressed-row form. Each stored (row, col)
/// owns a slot id in row-major order.
class SparsityPattern {
 public:
  SparsityPattern() = default;
  explicit SparsityPattern(const std::vector<std::vector<Index>>& rows);

  Index n() const { return static_cast<Index>(row_ptr_.size()) - 1; }
  std::size_t size() const { return cols_.size(); }
  std::span<const Index> row(Index r) const {
    return {cols_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::size_t row_offset(Index r) const { return row_ptr_[r]; }
  /// -1 when absent.
  std::int64_t slot(Index r, Index c) const;
  Index slot_row(std::size_t slot) const;
  Index slot_col(std::size_t slot) const { return cols_[slot]; }

 private:
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> cols_;
};

/// Elimination of one pivot: its front and the not-yet-eliminated symbolic
/// neighbours at that moment, ascending by global index.
struct PivotStep {
  Index pivot = 0;
  NodeId front = 0;
  std::vector<Index> neighbors;
};

struct NodeElimination {
  NodeId node_id = 0;
  int level = 0;
  /// Front indices reordered: eliminated here, then shared, then computed
  /// at lower levels.
  std::vector<Index> order;
  Index eliminated = 0;
  Index shared = 0;
};

struct EliminationPlan {
  Index n_dof = 0;
  /// Tree nodes in visiting order, level by level from the leaves.
  std::vector<NodeElimination> nodes;
  /// The global elimination sequence.
  std::vector<PivotStep> steps;
  /// Position of each global index in `steps`.
  std::vector<Index> rank;
  /// Pattern including fill.
  SparsityPattern pattern;
  std::size_t original_nonzeros = 0;

  /// True when `a` is eliminated before `b`.
  bool before(Index a, Index b) const { return rank[a] < rank[b]; }
  std::vector<Index> pivot_order() const;
};

EliminationPlan symbolic_eliminate(const EliminationTree& tree,
                                   const GlobalSystem& system);

/// Task id arithmetic for the alphabet produced by enumerate_tasks.
///
/// Assertions come first, one per pattern slot. Then, per pivot step with
/// k neighbours: k divisions, k*k multiplications, k*k subtractions.
class TaskLayout {
 public:
  explicit TaskLayout(const EliminationPlan& plan);

  std::size_t size() const { return total_; }
  TaskId assertion(std::size_t slot) const {
    return static_cast<TaskId>(slot);
  }
  TaskId division(std::size_t step, std::size_t yi) const {
    return static_cast<TaskId>(offset_[step] + yi);
  }
  TaskId multiplication(std::size_t step, std::size_t xi,
                        std::size_t yi) const {
    const std::size_t k = width_[step];
    return static_cast<TaskId>(offset_[step] + k + xi * k + yi);
  }
  TaskId subtraction(std::size_t step, std::size_t xi, std::size_t yi) const {
    const std::size_t k = width_[step];
    return static_cast<TaskId>(offset_[step] + k + k * k + xi * k + yi);
  }

 private:
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> width_;
  std::size_t total_ = 0;
};

std::vector<Task> enumerate_tasks(const EliminationPlan& plan);

struct Edge {
  TaskId from;
  TaskId to;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Happens-before graph over the task alphabet. Stores the relation J
/// only; its transitive closure is never materialised.
class DiekertGraph {
 public:
  DiekertGraph() = default;
  DiekertGraph(std::vector<Task> tasks, std::vector<Edge> edges);

  std::size_t size() const { return tasks_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Task>& tasks() const { return tasks_; }
  const Task& task(TaskId id) const { return tasks_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const TaskId> successors(TaskId id) const {
    return {succ_.data() + succ_ptr_[id], succ_ptr_[id + 1] - succ_ptr_[id]};
  }
  std::span<const TaskId> predecessors(TaskId id) const {
    return {pred_.data() + pred_ptr_[id], pred_ptr_[id + 1] - pred_ptr_[id]};
  }

 private:
  std::vector<Task> tasks_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> succ_ptr_{0};
  std::vector<TaskId> succ_;
  std::vector<std::size_t> pred_ptr_{0};
  std::vector<TaskId> pred_;
};

DiekertGraph build_dependency_edges(std::vector<Task> tasks,
                                    const EliminationPlan& plan);

struct DagReport {
  bool acyclic = true;
  std::array<std::size_t, 4> counts{};
  /// Number of tasks on the longest path; 0 for an empty graph.
  std::size_t longest_path = 0;
  std::vector<TaskId> topological_order;
  /// One cycle, in edge order, when the graph is not acyclic.
  std::vector<TaskId> cycle;

  std::size_t count(TaskKind kind) const { return counts[kind_index(kind)]; }
};

DagReport validate_dag(const DiekertGraph& graph);

std::string export_dot(const DiekertGraph& graph);

/// CSV with header "kind,count".
std::string task_stats_csv(const DagReport& report);

}  // namespace mfront
