#pragma once

#include <span>
#include <string>
#include <vector>

#include "mfront/trace_graph.hpp"

namespace mfront {

enum class GroupKind : std::uint8_t { P1 = 1, P2 = 2, P3 = 3, P4 = 4 };

/// Tasks that always share a Foata class. p1..p3 are keyed by
/// (front, pivot, col), p4 by (row, col).
struct TaskGroup {
  GroupKind kind = GroupKind::P4;
  Index front = -1;
  Index pivot = -1;
  Index row = -1;
  Index col = -1;
  std::vector<TaskId> members;
};

/// Ordered by (kind, key).
std::vector<TaskGroup> group_tasks(std::span<const Task> tasks);

/// Bit (kind_index) set per task kind present.
using KindMask = std::uint8_t;

std::string kind_set_string(KindMask mask);

struct FoataSchedule {
  /// Each class sorted by (kind, front, pivot, row, col).
  std::vector<std::vector<TaskId>> classes;
  std::vector<KindMask> class_kinds;
  /// 0-based class of every task.
  std::vector<std::uint32_t> class_of;

  std::size_t size() const { return classes.size(); }
};

/// Canonical normal form: a source lands in the first class, every other
/// task one class after its latest predecessor.
FoataSchedule compute_fnf(const DiekertGraph& graph);

struct ScheduleStats {
  std::size_t class_count = 0;
  std::vector<std::size_t> widths;
  std::vector<KindMask> kinds;
  std::size_t max_width = 0;
  /// 1-based indices of classes holding both divisions and subtractions.
  std::vector<std::size_t> division_subtraction_mixed;
  std::size_t single_kind_classes = 0;
  /// Every class holds one kind and kinds cycle assertion, division,
  /// multiplication, subtraction.
  bool four_periodic = false;
};

ScheduleStats schedule_stats(const FoataSchedule& schedule);

/// Header "class_index,kind_set,size"; class indices are 1-based.
std::string schedule_csv(const FoataSchedule& schedule);

/// "class k: label label ..." per line.
std::string schedule_dump(const FoataSchedule& schedule,
                          const DiekertGraph& graph);

}  // namespace mfront
