#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfront/foata.hpp"
#include "mfront/trace_graph.hpp"

namespace mfront {

/// Live numeric state of a factorization.
struct ExecState {
  /// Global matrix a_(x,y), indexed by pattern slot; fill starts at zero.
  std::vector<double> values;
  /// Division results t1, one per division in task-id order.
  std::vector<double> t1;
  /// Multiplication results t2, one per multiplication in task-id order.
  std::vector<double> t2;
  /// Per slot: the element's assertion has fired.
  std::vector<std::uint8_t> finalized;
  double zero_pivot_threshold = 0.0;
};

/// LU factors of the stored form M = L * diag(u_zz) * U~ with L unit lower
/// and U~ unit upper in pivot order. `upper` holds the division results
/// u_zy = t1 = a_zy / a_zz, `lower` the multipliers l_xz = a_xz / a_zz.
struct FactorResult {
  Index n_dof = 0;
  std::vector<Index> pivot_order;
  /// u_zz by global index.
  std::vector<double> diagonal;
  /// (z, y, t1) grouped by pivot step.
  std::vector<SparseEntry> upper;
  /// (x, z, l_xz) grouped by pivot step, aligned with `upper`.
  std::vector<SparseEntry> lower;
  /// Entries of step s live in [step_offset[s], step_offset[s + 1]).
  std::vector<std::size_t> step_offset{0};

  /// Unit-lower L including its unit diagonal.
  std::vector<SparseEntry> lower_factor_entries() const;
  /// U = diag(u_zz) * U~, so that L * U reproduces M.
  std::vector<SparseEntry> upper_factor_entries() const;
};

/// Equality of every stored double bit pattern.
bool bitwise_equal(const FactorResult& a, const FactorResult& b);
bool bitwise_equal(std::span<const double> a, std::span<const double> b);

struct ConcurrentOptions {
  unsigned workers = 1;
  /// When set, each class is claimed in a seeded random order.
  std::optional<std::uint64_t> shuffle_seed;
  /// Record per-class write sets and check happens-before and
  /// read-after-final on every task.
  bool debug_checks = false;
};

struct ConcurrencyAudit {
  std::size_t classes_executed = 0;
  std::size_t writes_recorded = 0;
  std::size_t predecessor_checks = 0;
  bool write_sets_disjoint = true;
};

/// Tasks flattened into schedule order for execution.
struct ScheduledProgram {
  std::vector<TaskId> order;
  std::vector<std::size_t> class_offset{0};

  std::size_t class_count() const { return class_offset.size() - 1; }
};

/// Executes task semantics over an ExecState. Holds references to the
/// graph and plan, which must outlive it.
class TaskExecutor {
 public:
  TaskExecutor(const DiekertGraph& graph, const EliminationPlan& plan);

  const DiekertGraph& graph() const { return *graph_; }
  const EliminationPlan& plan() const { return *plan_; }

  ExecState initial_state(const GlobalSystem& system) const;

  /// Runs one task. With `checked`, reading an element that has not been
  /// asserted final throws ContractViolation.
  void execute_task(TaskId id, ExecState& state, bool checked = false) const;

  void execute_in_order(std::span<const TaskId> order, ExecState& state,
                        bool checked = false) const;

  ScheduledProgram compile(const FoataSchedule& schedule,
                           std::optional<std::uint64_t> shuffle_seed = {}) const;

  FactorResult run_sequential(const FoataSchedule& schedule,
                              ExecState& state) const;

  FactorResult run_concurrent(const FoataSchedule& schedule, ExecState& state,
                              const ConcurrentOptions& options,
                              ConcurrencyAudit* audit = nullptr) const;

  /// Executes classes in order with a full barrier in between.
  void run_program(const ScheduledProgram& program, ExecState& state,
                   const ConcurrentOptions& options,
                   ConcurrencyAudit* audit = nullptr) const;

  /// Reads the factors out of a fully executed state.
  FactorResult extract_factors(const ExecState& state) const;

 private:
  struct Instr {
    TaskKind kind;
    std::uint32_t out;
    std::uint32_t in1;
    std::uint32_t in2;
  };

  void run(const Instr& ins, ExecState& state) const;
  void check_reads(const Instr& ins, const ExecState& state,
                   TaskId id) const;
  [[noreturn]] void throw_zero_pivot(Index pivot, double value) const;

  const DiekertGraph* graph_;
  const EliminationPlan* plan_;
  std::vector<Instr> program_;
  std::vector<std::uint32_t> pivot_slot_;
  std::size_t division_count_ = 0;
  std::size_t multiplication_count_ = 0;
};

/// Forward substitution with L in pivot order, then backward with U.
std::vector<double> solve(const FactorResult& factors,
                          std::span<const double> rhs);

/// ||L U - M||_F / ||M||_F.
double reconstruction_error(const FactorResult& factors,
                            const GlobalSystem& system);

/// ||M u - b||_2 / ||b||_2, or ||M u||_2 when b = 0.
double relative_residual(const GlobalSystem& system,
                         std::span<const double> solution,
                         std::span<const double> rhs);

}  // namespace mfront
