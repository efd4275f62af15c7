#include "mfront/foata.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <tuple>

namespace mfront {

std::vector<TaskGroup> group_tasks(std::span<const Task> tasks) {
  using Key = std::tuple<int, Index, Index, Index, Index>;
  std::map<Key, TaskGroup> groups;
  for (TaskId id = 0; id < tasks.size(); ++id) {
    const Task& t = tasks[id];
    Key key;
    TaskGroup proto;
    switch (t.kind) {
      case TaskKind::Division:
      case TaskKind::Multiplication:
      case TaskKind::Subtraction:
        proto.kind = static_cast<GroupKind>(t.kind);
        proto.front = t.front;
        proto.pivot = t.pivot;
        proto.col = t.col;
        key = {static_cast<int>(t.kind), t.front, t.pivot, -1, t.col};
        break;
      case TaskKind::Assertion:
        proto.kind = GroupKind::P4;
        proto.row = t.row;
        proto.col = t.col;
        key = {4, -1, -1, t.row, t.col};
        break;
    }
    auto [it, inserted] = groups.try_emplace(key, proto);
    it->second.members.push_back(id);
  }
  std::vector<TaskGroup> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) out.push_back(std::move(group));
  return out;
}

std::string kind_set_string(KindMask mask) {
  std::string out;
  for (TaskKind kind : kAllTaskKinds) {
    if (mask & (1u << kind_index(kind))) {
      if (!out.empty()) out += '|';
      out += fmt::format("T{}", static_cast<int>(kind));
    }
  }
  return out;
}

FoataSchedule compute_fnf(const DiekertGraph& graph) {
  const std::size_t n = graph.size();
  FoataSchedule schedule;
  schedule.class_of.assign(n, 0);
  std::vector<std::size_t> indegree(n);
  std::vector<TaskId> ready;
  for (TaskId v = 0; v < n; ++v) {
    indegree[v] = graph.predecessors(v).size();
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::size_t processed = 0;
  std::uint32_t max_class = 0;
  while (!ready.empty()) {
    const TaskId v = ready.back();
    ready.pop_back();
    ++processed;
    max_class = std::max(max_class, schedule.class_of[v]);
    for (TaskId w : graph.successors(v)) {
      schedule.class_of[w] =
          std::max(schedule.class_of[w], schedule.class_of[v] + 1);
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (processed != n) {
    const auto report = validate_dag(graph);
    throw CycleError("cannot compute a normal form of a cyclic graph",
                     report.cycle);
  }
  if (n == 0) return schedule;

  schedule.classes.resize(max_class + 1);
  std::vector<std::size_t> sizes(max_class + 1, 0);
  for (TaskId v = 0; v < n; ++v) sizes[schedule.class_of[v]]++;
  for (std::size_t c = 0; c <= max_class; ++c) schedule.classes[c].reserve(sizes[c]);
  for (TaskId v = 0; v < n; ++v) schedule.classes[schedule.class_of[v]].push_back(v);
  schedule.class_kinds.assign(max_class + 1, 0);
  for (std::size_t c = 0; c <= max_class; ++c) {
    auto& cls = schedule.classes[c];
    std::sort(cls.begin(), cls.end(), [&](TaskId a, TaskId b) {
      return graph.task(a) < graph.task(b);
    });
    for (TaskId v : cls) {
      schedule.class_kinds[c] |= static_cast<KindMask>(
          1u << kind_index(graph.task(v).kind));
    }
  }
  return schedule;
}

ScheduleStats schedule_stats(const FoataSchedule& schedule) {
  ScheduleStats stats;
  stats.class_count = schedule.size();
  constexpr KindMask kDiv = 1u << 0;
  constexpr KindMask kSub = 1u << 2;
  // Expected kind of class c under the assertion/division/multiplication/
  // subtraction cycle.
  constexpr KindMask kCycle[4] = {1u << 3, 1u << 0, 1u << 1, 1u << 2};
  stats.four_periodic = schedule.size() > 0;
  for (std::size_t c = 0; c < schedule.size(); ++c) {
    const std::size_t width = schedule.classes[c].size();
    const KindMask mask = schedule.class_kinds[c];
    stats.widths.push_back(width);
    stats.kinds.push_back(mask);
    stats.max_width = std::max(stats.max_width, width);
    if ((mask & kDiv) && (mask & kSub)) {
      stats.division_subtraction_mixed.push_back(c + 1);
    }
    const bool single = mask != 0 && (mask & (mask - 1)) == 0;
    if (single) stats.single_kind_classes++;
    if (mask != kCycle[c % 4]) stats.four_periodic = false;
  }
  return stats;
}

std::string schedule_csv(const FoataSchedule& schedule) {
  std::string out = "class_index,kind_set,size\n";
  for (std::size_t c = 0; c < schedule.size(); ++c) {
    out += fmt::format("{},{},{}\n", c + 1,
                       kind_set_string(schedule.class_kinds[c]),
                       schedule.classes[c].size());
  }
  return out;
}

std::string schedule_dump(const FoataSchedule& schedule,
                          const DiekertGraph& graph) {
  std::string out;
  for (std::size_t c = 0; c < schedule.size(); ++c) {
    out += fmt::format("class {}:", c + 1);
    for (TaskId v : schedule.classes[c]) {
      out += ' ';
      out += to_label(graph.task(v));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mfront
