#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "mfront/dense.hpp"
#include "mfront/elimination_tree.hpp"
#include "mfront/execution.hpp"
#include "mfront/trace_graph.hpp"

namespace mfront::support {

using Coord = std::pair<Index, Index>;

// Result of the textbook per-front loop nest, kept in ordered maps so it
// shares no storage layout with the task executor.
struct LoopNestResult {
  std::map<Coord, double> values;
  std::map<Coord, double> t1;
  std::vector<Index> order;
};

// Walks the tree level by level; at each front eliminates every fully
// summed, not yet computed pivot in ascending global order:
//   t1 = a[p,j] / a[p,p];  a[i,j] -= t1 * a[i,p].
LoopNestResult loop_nest_factorize(const EliminationTree& tree,
                                   const GlobalSystem& system);

// Uniformly shuffled Kahn traversal.
std::vector<TaskId> random_topological_order(const DiekertGraph& graph,
                                             std::mt19937_64& rng);

// Dense reachability under J+ as bit rows. Desk scale only.
class Reachability {
 public:
  explicit Reachability(const DiekertGraph& graph);
  bool reaches(TaskId a, TaskId b) const {
    return (bits_[a * words_ + b / 64] >> (b % 64)) & 1u;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

// Smallest mesh with n_dof = p * n_elements + 1 >= target.
Mesh mesh_for_dofs(Index target_dofs, int degree);

struct Instance {
  Mesh mesh;
  GlobalSystem system;
};

Instance make_instance(Index n_elements, int degree,
                       RhsFunction rhs = RhsFunction::One);

bool same_bits(double a, double b);

Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937& rng);
Eigen::MatrixXd random_dense(Eigen::Index rows, Eigen::Index cols, std::mt19937& rng);

// Relative Frobenius error of [[I,0],[E C^-1,I]] [[C,0],[0,S]] [[I,C^-1 D],[0,I]]
// against [[C,D],[E,-F]], with C^-1 from an explicit inverse.
double schur_reconstruction_error(const SchurBlocks& blocks, const Eigen::MatrixXd& s);

}  // namespace mfront::support
