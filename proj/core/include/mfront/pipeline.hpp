#pragma once

#include <memory>
#include <vector>

#include "mfront/execution.hpp"
#include "mfront/foata.hpp"

namespace mfront {

// Everything built ahead of numeric factorization. Heap-held so the
// executor's references stay valid when the bundle moves.
struct SolverPlan {
  std::unique_ptr<EliminationTree> tree;
  std::unique_ptr<EliminationPlan> plan;
  std::unique_ptr<DiekertGraph> graph;
  std::unique_ptr<FoataSchedule> schedule;
  std::unique_ptr<TaskExecutor> executor;
};

SolverPlan make_solver_plan(std::vector<Front> fronts, const GlobalSystem& system);
SolverPlan make_solver_plan(const Mesh& mesh, const GlobalSystem& system);

}  // namespace mfront
