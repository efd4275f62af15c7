#include "mfront/pipeline.hpp"

namespace mfront {

SolverPlan make_solver_plan(std::vector<Front> fronts, const GlobalSystem& system) {
  SolverPlan out;
  out.tree = std::make_unique<EliminationTree>(build_elimination_tree(std::move(fronts)));
  out.plan = std::make_unique<EliminationPlan>(symbolic_eliminate(*out.tree, system));
  out.graph = std::make_unique<DiekertGraph>(
      build_dependency_edges(enumerate_tasks(*out.plan), *out.plan));
  out.schedule = std::make_unique<FoataSchedule>(compute_fnf(*out.graph));
  out.executor = std::make_unique<TaskExecutor>(*out.graph, *out.plan);
  return out;
}

SolverPlan make_solver_plan(const Mesh& mesh, const GlobalSystem& system) {
  return make_solver_plan(generate_fronts(mesh), system);
}

}  // namespace mfront
