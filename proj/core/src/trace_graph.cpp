#include "mfront/trace_graph.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>

namespace mfront {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Division:
      return "Division";
    case TaskKind::Multiplication:
      return "Multiplication";
    case TaskKind::Subtraction:
      return "Subtraction";
    case TaskKind::Assertion:
      return "Assertion";
  }
  return "?";
}

std::string to_label(const Task& task) {
  if (task.kind == TaskKind::Assertion) {
    return fmt::format("T4;{},{}", task.row, task.col);
  }
  return fmt::format("T{};f={};{},{},{}", static_cast<int>(task.kind),
                     task.front, task.pivot, task.row, task.col);
}

SparsityPattern::SparsityPattern(const std::vector<std::vector<Index>>& rows) {
  row_ptr_.assign(rows.size() + 1, 0);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  cols_.reserve(total);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    cols_.insert(cols_.end(), rows[r].begin(), rows[r].end());
    row_ptr_[r + 1] = cols_.size();
  }
}

std::int64_t SparsityPattern::slot(Index r, Index c) const {
  const auto cols = row(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return -1;
  return static_cast<std::int64_t>(row_ptr_[r] + (it - cols.begin()));
}

Index SparsityPattern::slot_row(std::size_t slot) const {
  const auto it = std::upper_bound(row_ptr_.begin(), row_ptr_.end(), slot);
  return static_cast<Index>(it - row_ptr_.begin()) - 1;
}

std::vector<Index> EliminationPlan::pivot_order() const {
  std::vector<Index> order;
  order.reserve(steps.size());
  for (const auto& s : steps) order.push_back(s.pivot);
  return order;
}

EliminationPlan symbolic_eliminate(const EliminationTree& tree,
                                   const GlobalSystem& system) {
  const Index n = system.n_dof();
  EliminationPlan plan;
  plan.n_dof = n;

  std::vector<std::vector<Index>> rows(n);
  for (Index r = 0; r < n; ++r) {
    for (Index c : system.row_cols(r)) {
      rows[r].push_back(c);
      if (c != r) rows[c].push_back(r);
    }
  }
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    plan.original_nonzeros += r.size();
  }

  std::vector<bool> eliminated(n, false);
  std::vector<NodeId> owner(n, -1);
  plan.rank.assign(n, -1);
  for (const auto& level : tree.levels()) {
    for (NodeId id : level) {
      const TreeNode& node = tree.node(id);
      const Front& front = node.front;
      for (Index g : front.local_to_global) {
        if (g < 0 || g >= n) {
          throw DimensionMismatchError(
              fmt::format("front {} references DOF {} outside the system", id, g));
        }
        owner[g] = id;
      }

      NodeElimination visit;
      visit.node_id = id;
      visit.level = node.level;
      const auto pivots = eligible_pivots(front);
      for (Index k : pivots) visit.order.push_back(front.local_to_global[k]);
      visit.eliminated = static_cast<Index>(pivots.size());
      std::vector<Index> shared, computed;
      for (Index k = 0; k < front.size(); ++k) {
        if (front.computed[k]) {
          computed.push_back(front.local_to_global[k]);
        } else if (front.membership_count[k] > 1) {
          shared.push_back(front.local_to_global[k]);
        }
      }
      std::sort(shared.begin(), shared.end());
      std::sort(computed.begin(), computed.end());
      visit.shared = static_cast<Index>(shared.size());
      visit.order.insert(visit.order.end(), shared.begin(), shared.end());
      visit.order.insert(visit.order.end(), computed.begin(), computed.end());

      for (Index z : std::span(visit.order).first(visit.eliminated)) {
        if (eliminated[z]) {
          throw ContractViolation(fmt::format("DOF {} eliminated twice", z));
        }
        if (!std::binary_search(rows[z].begin(), rows[z].end(), z)) {
          throw SymbolicSingularityError(z);
        }
        PivotStep step;
        step.pivot = z;
        step.front = id;
        for (Index y : rows[z]) {
          if (y == z || eliminated[y]) continue;
          if (owner[y] != id) {
            throw ContractViolation(fmt::format(
                "pivot {} in front {} couples to DOF {} outside the front", z,
                id, y));
          }
          step.neighbors.push_back(y);
        }
        for (Index x : step.neighbors) {
          auto& row = rows[x];
          for (Index y : step.neighbors) {
            const auto it = std::lower_bound(row.begin(), row.end(), y);
            if (it == row.end() || *it != y) row.insert(it, y);
          }
        }
        eliminated[z] = true;
        plan.rank[z] = static_cast<Index>(plan.steps.size());
        plan.steps.push_back(std::move(step));
      }
      plan.nodes.push_back(std::move(visit));
    }
  }
  for (Index g = 0; g < n; ++g) {
    if (!eliminated[g]) {
      throw Error(fmt::format("DOF {} is never eliminated by the tree", g));
    }
  }
  plan.pattern = SparsityPattern(rows);
  return plan;
}

TaskLayout::TaskLayout(const EliminationPlan& plan) {
  total_ = plan.pattern.size();
  offset_.reserve(plan.steps.size());
  width_.reserve(plan.steps.size());
  for (const auto& step : plan.steps) {
    const std::size_t k = step.neighbors.size();
    offset_.push_back(total_);
    width_.push_back(k);
    total_ += k + 2 * k * k;
  }
}

std::vector<Task> enumerate_tasks(const EliminationPlan& plan) {
  const TaskLayout layout(plan);
  std::vector<Task> tasks(layout.size());
  const auto& pattern = plan.pattern;
  for (Index r = 0; r < pattern.n(); ++r) {
    const auto cols = pattern.row(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      tasks[layout.assertion(pattern.row_offset(r) + k)] =
          Task::assertion(r, cols[k]);
    }
  }
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    const auto& step = plan.steps[s];
    const auto& nb = step.neighbors;
    for (std::size_t yi = 0; yi < nb.size(); ++yi) {
      tasks[layout.division(s, yi)] =
          Task::division(step.front, step.pivot, nb[yi]);
    }
    for (std::size_t xi = 0; xi < nb.size(); ++xi) {
      for (std::size_t yi = 0; yi < nb.size(); ++yi) {
        tasks[layout.multiplication(s, xi, yi)] =
            Task::multiplication(step.front, step.pivot, nb[xi], nb[yi]);
        tasks[layout.subtraction(s, xi, yi)] =
            Task::subtraction(step.front, step.pivot, nb[xi], nb[yi]);
      }
    }
  }
  return tasks;
}

DiekertGraph::DiekertGraph(std::vector<Task> tasks, std::vector<Edge> edges)
    : tasks_(std::move(tasks)), edges_(std::move(edges)) {
  const std::size_t n = tasks_.size();
  succ_ptr_.assign(n + 1, 0);
  pred_ptr_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    if (e.from >= n || e.to >= n) throw Error("edge references unknown task");
    succ_ptr_[e.from + 1]++;
    pred_ptr_[e.to + 1]++;
  }
  for (std::size_t i = 0; i < n; ++i) {
    succ_ptr_[i + 1] += succ_ptr_[i];
    pred_ptr_[i + 1] += pred_ptr_[i];
  }
  succ_.resize(edges_.size());
  pred_.resize(edges_.size());
  std::vector<std::size_t> s_fill(succ_ptr_.begin(), succ_ptr_.end() - 1);
  std::vector<std::size_t> p_fill(pred_ptr_.begin(), pred_ptr_.end() - 1);
  for (const auto& e : edges_) {
    succ_[s_fill[e.from]++] = e.to;
    pred_[p_fill[e.to]++] = e.from;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(succ_.begin() + succ_ptr_[i], succ_.begin() + succ_ptr_[i + 1]);
    std::sort(pred_.begin() + pred_ptr_[i], pred_.begin() + pred_ptr_[i + 1]);
  }
}

DiekertGraph build_dependency_edges(std::vector<Task> tasks,
                                    const EliminationPlan& plan) {
  const TaskLayout layout(plan);
  if (tasks.size() != layout.size()) {
    throw ContractViolation("task alphabet does not match the elimination plan");
  }
  const auto& pattern = plan.pattern;
  const auto slot_of = [&](Index r, Index c) {
    const auto s = pattern.slot(r, c);
    if (s < 0) {
      throw ContractViolation(
          fmt::format("element ({},{}) missing from the pattern", r, c));
    }
    return static_cast<std::size_t>(s);
  };

  constexpr TaskId kNone = ~TaskId{0};
  std::vector<TaskId> last_sub(pattern.size(), kNone);
  std::vector<Edge> edges;
  std::size_t estimate = 0;
  for (const auto& step : plan.steps) {
    const std::size_t k = step.neighbors.size();
    estimate += 2 * k + 4 * k * k;
  }
  edges.reserve(estimate + pattern.size());

  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    const auto& step = plan.steps[s];
    const Index z = step.pivot;
    const auto& nb = step.neighbors;
    const TaskId pivot_assert = layout.assertion(slot_of(z, z));
    for (std::size_t yi = 0; yi < nb.size(); ++yi) {
      const TaskId div = layout.division(s, yi);
      // J1: the divided element and the pivot must be final.
      edges.push_back({layout.assertion(slot_of(z, nb[yi])), div});
      edges.push_back({pivot_assert, div});
    }
    for (std::size_t xi = 0; xi < nb.size(); ++xi) {
      const TaskId column_assert = layout.assertion(slot_of(nb[xi], z));
      for (std::size_t yi = 0; yi < nb.size(); ++yi) {
        const TaskId mul = layout.multiplication(s, xi, yi);
        const TaskId sub = layout.subtraction(s, xi, yi);
        // J2
        edges.push_back({layout.division(s, yi), mul});
        edges.push_back({column_assert, mul});
        // J3: producer, then the previous writer of the same element.
        edges.push_back({mul, sub});
        const std::size_t target = slot_of(nb[xi], nb[yi]);
        if (last_sub[target] != kNone) edges.push_back({last_sub[target], sub});
        last_sub[target] = sub;
      }
    }
  }
  // J4: the last writer of each element precedes its assertion.
  for (std::size_t slot = 0; slot < pattern.size(); ++slot) {
    if (last_sub[slot] != kNone) {
      edges.push_back({last_sub[slot], layout.assertion(slot)});
    }
  }

  DiekertGraph graph(std::move(tasks), std::move(edges));
  const auto report = validate_dag(graph);
  if (!report.acyclic) {
    throw CycleError("dependency graph has a cycle", report.cycle);
  }
  return graph;
}

DagReport validate_dag(const DiekertGraph& graph) {
  const std::size_t n = graph.size();
  DagReport report;
  for (const auto& t : graph.tasks()) report.counts[kind_index(t.kind)]++;

  std::vector<std::size_t> indegree(n);
  std::vector<std::size_t> depth(n, 1);
  std::deque<TaskId> ready;
  for (TaskId v = 0; v < n; ++v) {
    indegree[v] = graph.predecessors(v).size();
    if (indegree[v] == 0) ready.push_back(v);
  }
  report.topological_order.reserve(n);
  while (!ready.empty()) {
    const TaskId v = ready.front();
    ready.pop_front();
    report.topological_order.push_back(v);
    report.longest_path = std::max(report.longest_path, depth[v]);
    for (TaskId w : graph.successors(v)) {
      depth[w] = std::max(depth[w], depth[v] + 1);
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (report.topological_order.size() == n) return report;

  report.acyclic = false;
  // Every task left has a predecessor that is also left; walk backwards
  // until a task repeats.
  TaskId v = 0;
  while (indegree[v] == 0) ++v;
  std::vector<std::size_t> seen_at(n, n);
  std::vector<TaskId> walk;
  while (seen_at[v] == n) {
    seen_at[v] = walk.size();
    walk.push_back(v);
    for (TaskId u : graph.predecessors(v)) {
      if (indegree[u] > 0) {
        v = u;
        break;
      }
    }
  }
  report.cycle.assign(walk.begin() + seen_at[v], walk.end());
  std::reverse(report.cycle.begin(), report.cycle.end());
  report.longest_path = 0;
  return report;
}

std::string export_dot(const DiekertGraph& graph) {
  std::string out = "digraph {\n";
  for (TaskId v = 0; v < graph.size(); ++v) {
    out += fmt::format("  t{} [label=\"{}\"];\n", v, to_label(graph.task(v)));
  }
  auto edges = graph.edges();
  std::sort(edges.begin(), edges.end());
  for (const auto& e : edges) out += fmt::format("  t{} -> t{};\n", e.from, e.to);
  out += "}\n";
  return out;
}

std::string task_stats_csv(const DagReport& report) {
  std::string out = "kind,count\n";
  for (TaskKind kind : kAllTaskKinds) {
    out += fmt::format("{},{}\n", to_string(kind), report.count(kind));
  }
  return out;
}

}  // namespace mfront
