#include "mfront/execution.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <bit>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_map>

namespace mfront {

namespace {

std::uint32_t slot_or_throw(const SparsityPattern& pattern, Index r, Index c) {
  const auto s = pattern.slot(r, c);
  if (s < 0) {
    throw ContractViolation(
        fmt::format("element ({},{}) missing from the pattern", r, c));
  }
  return static_cast<std::uint32_t>(s);
}

enum WriteSpace : std::uint64_t { kValues = 0, kT1 = 1, kT2 = 2, kFinal = 3 };

std::uint64_t write_key(WriteSpace space, std::uint32_t index) {
  return (static_cast<std::uint64_t>(space) << 60) | index;
}

}  // namespace

std::vector<SparseEntry> FactorResult::lower_factor_entries() const {
  std::vector<SparseEntry> out;
  out.reserve(lower.size() + pivot_order.size());
  for (Index z : pivot_order) out.push_back({z, z, 1.0});
  out.insert(out.end(), lower.begin(), lower.end());
  return out;
}

std::vector<SparseEntry> FactorResult::upper_factor_entries() const {
  std::vector<SparseEntry> out;
  out.reserve(upper.size() + pivot_order.size());
  for (Index z : pivot_order) out.push_back({z, z, diagonal[z]});
  for (const auto& e : upper) out.push_back({e.row, e.col, diagonal[e.row] * e.value});
  return out;
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) {
      return false;
    }
  }
  return true;
}

bool bitwise_equal(const FactorResult& a, const FactorResult& b) {
  const auto same_entries = [](const std::vector<SparseEntry>& x,
                               const std::vector<SparseEntry>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].row != y[i].row || x[i].col != y[i].col ||
          std::bit_cast<std::uint64_t>(x[i].value) !=
              std::bit_cast<std::uint64_t>(y[i].value)) {
        return false;
      }
    }
    return true;
  };
  return a.n_dof == b.n_dof && a.pivot_order == b.pivot_order &&
         a.step_offset == b.step_offset && bitwise_equal(a.diagonal, b.diagonal) &&
         same_entries(a.upper, b.upper) && same_entries(a.lower, b.lower);
}

TaskExecutor::TaskExecutor(const DiekertGraph& graph, const EliminationPlan& plan)
    : graph_(&graph), plan_(&plan) {
  const TaskLayout layout(plan);
  if (layout.size() != graph.size()) {
    throw ContractViolation("graph does not match the elimination plan");
  }
  const auto& pattern = plan.pattern;
  program_.resize(graph.size());
  pivot_slot_.assign(plan.n_dof, 0);
  for (Index r = 0; r < pattern.n(); ++r) {
    const auto cols = pattern.row(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto slot = static_cast<std::uint32_t>(pattern.row_offset(r) + k);
      program_[layout.assertion(slot)] = {TaskKind::Assertion, slot,
                                          cols[k] == r ? 1u : 0u, 0};
      if (cols[k] == r) pivot_slot_[r] = slot;
    }
  }
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    const auto& step = plan.steps[s];
    const auto& nb = step.neighbors;
    const std::size_t k = nb.size();
    const auto d0 = static_cast<std::uint32_t>(division_count_);
    const auto m0 = static_cast<std::uint32_t>(multiplication_count_);
    const std::uint32_t pivot = slot_or_throw(pattern, step.pivot, step.pivot);
    for (std::size_t yi = 0; yi < k; ++yi) {
      program_[layout.division(s, yi)] = {
          TaskKind::Division, static_cast<std::uint32_t>(d0 + yi),
          slot_or_throw(pattern, step.pivot, nb[yi]), pivot};
    }
    for (std::size_t xi = 0; xi < k; ++xi) {
      const std::uint32_t column = slot_or_throw(pattern, nb[xi], step.pivot);
      for (std::size_t yi = 0; yi < k; ++yi) {
        const auto t2 = static_cast<std::uint32_t>(m0 + xi * k + yi);
        program_[layout.multiplication(s, xi, yi)] = {
            TaskKind::Multiplication, t2, static_cast<std::uint32_t>(d0 + yi),
            column};
        program_[layout.subtraction(s, xi, yi)] = {
            TaskKind::Subtraction, slot_or_throw(pattern, nb[xi], nb[yi]), t2, 0};
      }
    }
    division_count_ += k;
    multiplication_count_ += k * k;
  }
  for (TaskId id = 0; id < graph.size(); ++id) {
    if (graph.task(id).kind != program_[id].kind) {
      throw ContractViolation("task kinds do not match the elimination plan");
    }
  }
}

ExecState TaskExecutor::initial_state(const GlobalSystem& system) const {
  const auto& pattern = plan_->pattern;
  if (system.n_dof() != plan_->n_dof) {
    throw DimensionMismatchError("system size differs from the plan");
  }
  ExecState state;
  state.values.assign(pattern.size(), 0.0);
  for (Index r = 0; r < pattern.n(); ++r) {
    const auto slots = pattern.row(r);
    const auto cols = system.row_cols(r);
    const auto vals = system.row_values(r);
    std::size_t k = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      while (k < slots.size() && slots[k] < cols[c]) ++k;
      if (k == slots.size() || slots[k] != cols[c]) {
        throw ContractViolation("system entry missing from the plan pattern");
      }
      state.values[pattern.row_offset(r) + k] = vals[c];
    }
  }
  state.t1.assign(division_count_, 0.0);
  state.t2.assign(multiplication_count_, 0.0);
  state.finalized.assign(pattern.size(), 0);
  state.zero_pivot_threshold = 1e-14 * system.max_abs_entry();
  return state;
}

void TaskExecutor::throw_zero_pivot(Index pivot, double value) const {
  throw ZeroPivotError(plan_->steps[plan_->rank[pivot]].front, pivot, value);
}

void TaskExecutor::run(const Instr& ins, ExecState& state) const {
  switch (ins.kind) {
    case TaskKind::Division: {
      const double pivot = state.values[ins.in2];
      if (std::abs(pivot) <= state.zero_pivot_threshold) {
        throw_zero_pivot(plan_->pattern.slot_row(ins.in2), pivot);
      }
      state.t1[ins.out] = state.values[ins.in1] / pivot;
      break;
    }
    case TaskKind::Multiplication:
      state.t2[ins.out] = state.t1[ins.in1] * state.values[ins.in2];
      break;
    case TaskKind::Subtraction:
      state.values[ins.out] -= state.t2[ins.in1];
      break;
    case TaskKind::Assertion:
      state.finalized[ins.out] = 1;
      if (ins.in1 != 0 &&
          std::abs(state.values[ins.out]) <= state.zero_pivot_threshold) {
        throw_zero_pivot(plan_->pattern.slot_row(ins.out), state.values[ins.out]);
      }
      break;
  }
}

void TaskExecutor::check_reads(const Instr& ins, const ExecState& state,
                               TaskId id) const {
  const auto require = [&](std::uint32_t slot) {
    if (!state.finalized[slot]) {
      throw ContractViolation(fmt::format(
          "task {} reads element ({},{}) before its assertion",
          to_label(graph_->task(id)), plan_->pattern.slot_row(slot),
          plan_->pattern.slot_col(slot)));
    }
  };
  switch (ins.kind) {
    case TaskKind::Division:
      require(ins.in1);
      require(ins.in2);
      break;
    case TaskKind::Multiplication:
      require(ins.in2);
      break;
    case TaskKind::Subtraction:
      if (state.finalized[ins.out]) {
        throw ContractViolation(fmt::format(
            "task {} writes an element already asserted final",
            to_label(graph_->task(id))));
      }
      break;
    case TaskKind::Assertion:
      break;
  }
}

void TaskExecutor::execute_task(TaskId id, ExecState& state, bool checked) const {
  const Instr& ins = program_.at(id);
  if (checked) check_reads(ins, state, id);
  run(ins, state);
}

void TaskExecutor::execute_in_order(std::span<const TaskId> order,
                                    ExecState& state, bool checked) const {
  for (TaskId id : order) execute_task(id, state, checked);
}

ScheduledProgram TaskExecutor::compile(
    const FoataSchedule& schedule,
    std::optional<std::uint64_t> shuffle_seed) const {
  ScheduledProgram program;
  program.order.reserve(graph_->size());
  std::optional<std::mt19937_64> rng;
  if (shuffle_seed) rng.emplace(*shuffle_seed);
  for (const auto& cls : schedule.classes) {
    const auto begin = program.order.size();
    program.order.insert(program.order.end(), cls.begin(), cls.end());
    if (rng) std::shuffle(program.order.begin() + begin, program.order.end(), *rng);
    program.class_offset.push_back(program.order.size());
  }
  if (program.order.size() != graph_->size()) {
    throw ContractViolation("schedule does not cover every task");
  }
  return program;
}

FactorResult TaskExecutor::run_sequential(const FoataSchedule& schedule,
                                          ExecState& state) const {
  const auto program = compile(schedule);
  execute_in_order(program.order, state);
  return extract_factors(state);
}

FactorResult TaskExecutor::run_concurrent(const FoataSchedule& schedule,
                                          ExecState& state,
                                          const ConcurrentOptions& options,
                                          ConcurrencyAudit* audit) const {
  run_program(compile(schedule, options.shuffle_seed), state, options, audit);
  return extract_factors(state);
}

void TaskExecutor::run_program(const ScheduledProgram& program, ExecState& state,
                               const ConcurrentOptions& options,
                               ConcurrencyAudit* audit) const {
  if (options.workers < 1) throw Error("workers must be >= 1");
  if (program.order.size() != graph_->size()) {
    throw ContractViolation("program does not cover every task");
  }
  const std::size_t n_classes = program.class_count();
  const bool debug = options.debug_checks;
  const unsigned workers = options.workers;

  if (workers == 1 && !debug) {
    for (TaskId id : program.order) run(program_[id], state);
    if (audit) audit->classes_executed = n_classes;
    return;
  }

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::size_t current = 0;
  bool stop = n_classes == 0;

  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_position = program.order.size();

  std::vector<std::vector<std::uint64_t>> writes(debug ? workers : 0);
  std::unique_ptr<std::atomic<std::uint8_t>[]> done;
  if (debug) {
    done = std::make_unique<std::atomic<std::uint8_t>[]>(graph_->size());
    for (std::size_t i = 0; i < graph_->size(); ++i) done[i].store(0);
  }
  std::atomic<std::size_t> predecessor_checks{0};
  ConcurrencyAudit local_audit;
  std::string overlap;

  auto on_class_done = [&]() noexcept {
    if (debug) {
      std::vector<std::uint64_t> merged;
      for (auto& w : writes) {
        merged.insert(merged.end(), w.begin(), w.end());
        w.clear();
      }
      local_audit.writes_recorded += merged.size();
      std::sort(merged.begin(), merged.end());
      if (std::adjacent_find(merged.begin(), merged.end()) != merged.end()) {
        local_audit.write_sets_disjoint = false;
        overlap = fmt::format("class {} has overlapping write targets", current + 1);
      }
    }
    ++local_audit.classes_executed;
    ++current;
    cursor.store(0, std::memory_order_relaxed);
    if (failed.load() || !local_audit.write_sets_disjoint || current >= n_classes) {
      stop = true;
    }
  };
  std::barrier sync(static_cast<std::ptrdiff_t>(workers), on_class_done);

  auto work = [&](unsigned worker) {
    while (!stop) {
      const std::size_t begin = program.class_offset[current];
      const std::size_t size = program.class_offset[current + 1] - begin;
      const std::size_t chunk =
          std::clamp<std::size_t>(size / (8 * workers), 1, 256);
      for (;;) {
        const std::size_t first = cursor.fetch_add(chunk, std::memory_order_relaxed);
        if (first >= size) break;
        const std::size_t last = std::min(size, first + chunk);
        for (std::size_t i = first; i < last; ++i) {
          if (failed.load(std::memory_order_relaxed)) continue;
          const TaskId id = program.order[begin + i];
          const Instr& ins = program_[id];
          try {
            if (debug) {
              for (TaskId p : graph_->predecessors(id)) {
                if (!done[p].load(std::memory_order_acquire)) {
                  throw ContractViolation(fmt::format(
                      "task {} started before predecessor {}",
                      to_label(graph_->task(id)), to_label(graph_->task(p))));
                }
              }
              predecessor_checks.fetch_add(graph_->predecessors(id).size(),
                                           std::memory_order_relaxed);
              check_reads(ins, state, id);
              switch (ins.kind) {
                case TaskKind::Division:
                  writes[worker].push_back(write_key(kT1, ins.out));
                  break;
                case TaskKind::Multiplication:
                  writes[worker].push_back(write_key(kT2, ins.out));
                  break;
                case TaskKind::Subtraction:
                  writes[worker].push_back(write_key(kValues, ins.out));
                  break;
                case TaskKind::Assertion:
                  writes[worker].push_back(write_key(kFinal, ins.out));
                  break;
              }
            }
            run(ins, state);
            if (debug) done[id].store(1, std::memory_order_release);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (begin + i < error_position) {
              error_position = begin + i;
              error = std::current_exception();
            }
            failed.store(true);
          }
        }
      }
      sync.arrive_and_wait();
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
  }

  local_audit.predecessor_checks = predecessor_checks.load();
  if (audit) *audit = local_audit;
  if (error) std::rethrow_exception(error);
  if (!local_audit.write_sets_disjoint) throw ContractViolation(overlap);
}

FactorResult TaskExecutor::extract_factors(const ExecState& state) const {
  const auto& plan = *plan_;
  const auto& pattern = plan.pattern;
  FactorResult f;
  f.n_dof = plan.n_dof;
  f.pivot_order = plan.pivot_order();
  f.diagonal.assign(plan.n_dof, 0.0);
  std::size_t d = 0;
  for (const auto& step : plan.steps) {
    const Index z = step.pivot;
    const double pivot = state.values[pivot_slot_[z]];
    f.diagonal[z] = pivot;
    for (Index y : step.neighbors) f.upper.push_back({z, y, state.t1[d++]});
    for (Index x : step.neighbors) {
      f.lower.push_back({x, z, state.values[slot_or_throw(pattern, x, z)] / pivot});
    }
    f.step_offset.push_back(f.upper.size());
  }
  return f;
}

std::vector<double> solve(const FactorResult& factors,
                          std::span<const double> rhs) {
  const Index n = factors.n_dof;
  if (static_cast<Index>(rhs.size()) != n) {
    throw DimensionMismatchError("rhs length differs from n_dof");
  }
  std::vector<double> c(rhs.begin(), rhs.end());
  const std::size_t steps = factors.pivot_order.size();
  for (std::size_t s = 0; s < steps; ++s) {
    const double cz = c[factors.pivot_order[s]];
    for (std::size_t e = factors.step_offset[s]; e < factors.step_offset[s + 1]; ++e) {
      const auto& l = factors.lower[e];
      c[l.row] -= l.value * cz;
    }
  }
  std::vector<double> u(n, 0.0);
  for (std::size_t s = steps; s-- > 0;) {
    const Index z = factors.pivot_order[s];
    double v = c[z] / factors.diagonal[z];
    for (std::size_t e = factors.step_offset[s]; e < factors.step_offset[s + 1]; ++e) {
      const auto& t = factors.upper[e];
      v -= t.value * u[t.col];
    }
    u[z] = v;
  }
  return u;
}

double reconstruction_error(const FactorResult& factors,
                            const GlobalSystem& system) {
  const auto key = [](Index r, Index c) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(r)) << 32) |
           static_cast<std::uint32_t>(c);
  };
  std::unordered_map<std::uint64_t, double> product;
  product.reserve(2 * system.nnz());
  std::vector<std::pair<Index, double>> column, row;
  for (std::size_t s = 0; s < factors.pivot_order.size(); ++s) {
    const Index z = factors.pivot_order[s];
    const double pivot = factors.diagonal[z];
    column.assign(1, {z, 1.0});
    row.assign(1, {z, pivot});
    for (std::size_t e = factors.step_offset[s]; e < factors.step_offset[s + 1]; ++e) {
      column.emplace_back(factors.lower[e].row, factors.lower[e].value);
      row.emplace_back(factors.upper[e].col, pivot * factors.upper[e].value);
    }
    for (const auto& [x, l] : column) {
      for (const auto& [y, u] : row) product[key(x, y)] += l * u;
    }
  }
  double diff2 = 0.0;
  for (const auto& e : system.entries()) {
    const auto it = product.find(key(e.row, e.col));
    const double p = it == product.end() ? 0.0 : it->second;
    diff2 += (p - e.value) * (p - e.value);
    if (it != product.end()) product.erase(it);
  }
  for (const auto& [k, p] : product) diff2 += p * p;
  const double norm = system.frobenius_norm();
  return norm > 0.0 ? std::sqrt(diff2) / norm : std::sqrt(diff2);
}

double relative_residual(const GlobalSystem& system,
                         std::span<const double> solution,
                         std::span<const double> rhs) {
  if (static_cast<Index>(rhs.size()) != system.n_dof()) {
    throw DimensionMismatchError("rhs length differs from n_dof");
  }
  const auto mu = system.multiply(solution);
  double r2 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    r2 += (mu[i] - rhs[i]) * (mu[i] - rhs[i]);
    b2 += rhs[i] * rhs[i];
  }
  return b2 > 0.0 ? std::sqrt(r2 / b2) : std::sqrt(r2);
}

}  // namespace mfront
