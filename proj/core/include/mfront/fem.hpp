#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "mfront/error.hpp"

namespace mfront {

using ScalarFunction = std::function<double(double)>;

/// Built-in right-hand-side functions selectable from the command line.
enum class RhsFunction { One, SinPi, XSquared };

RhsFunction parse_rhs_function(std::string_view name);
std::string_view to_string(RhsFunction fn);
ScalarFunction make_rhs(RhsFunction fn);

/// Gauss-Legendre rule mapped to the reference interval [0, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(int n_points);

/// Number of quadrature points used for mass and load integrals at `degree`.
int quadrature_points(int degree);

void check_degree(int degree);

/// Uniform 1D mesh of Lagrange elements on [domain_start, domain_end].
///
/// Global DOFs are numbered left to right; element e owns DOFs
/// e*p .. e*p + p, so interior (bubble) DOFs sit between the element's
/// endpoint DOFs.
class Mesh {
 public:
  Mesh(Index n_elements, int degree, double domain_start = 0.0,
       double domain_end = 1.0);

  Index n_elements() const { return n_elements_; }
  int degree() const { return degree_; }
  double domain_start() const { return domain_start_; }
  double domain_end() const { return domain_end_; }
  double element_width() const {
    return (domain_end_ - domain_start_) / n_elements_;
  }
  Index n_dof() const { return degree_ * n_elements_ + 1; }

  double element_left(Index e) const;
  std::vector<Index> element_dofs(Index e) const;

 private:
  Index n_elements_;
  int degree_;
  double domain_start_;
  double domain_end_;
};

/// Lagrange basis on equispaced nodes k/p, k = 0..p, evaluated at xi.
std::vector<double> reference_basis(int degree, double xi);

Eigen::MatrixXd element_mass_matrix(double h, int degree);

Eigen::VectorXd element_load_vector(double h, int degree,
                                    const ScalarFunction& f,
                                    double element_offset);

struct SparseEntry {
  Index row;
  Index col;
  double value;
};

/// Assembled sparse system in compressed-row form with both triangles
/// stored.
class GlobalSystem {
 public:
  GlobalSystem() = default;

  /// Duplicate (row, col) contributions are summed in input order.
  static GlobalSystem from_triplets(Index n_dof,
                                    std::vector<SparseEntry> triplets,
                                    std::vector<double> rhs = {});

  Index n_dof() const { return n_dof_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const Index> row_cols(Index row) const;
  std::span<const double> row_values(Index row) const;

  bool contains(Index row, Index col) const;
  /// Zero when (row, col) is not stored.
  double at(Index row, Index col) const;

  const std::vector<double>& rhs() const { return rhs_; }
  void set_rhs(std::vector<double> rhs);

  std::vector<double> multiply(std::span<const double> x) const;
  Eigen::MatrixXd to_dense() const;
  double max_abs_entry() const;
  double frobenius_norm() const;
  double entry_sum() const;
  std::vector<SparseEntry> entries() const;

 private:
  Index n_dof_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
  std::vector<double> rhs_;
};

/// Dense elemental or merged submatrix with its global index map.
///
/// Fronts built inside the elimination tree are symbolic: `values` is
/// empty and the numeric state lives in the executor.
struct Front {
  Index front_id = 0;
  std::vector<Index> local_to_global;
  Eigen::MatrixXd values;
  std::vector<int> membership_count;
  std::vector<bool> computed;

  Index size() const { return static_cast<Index>(local_to_global.size()); }
  Index min_global() const;
  bool is_symbolic() const { return values.size() == 0; }
  /// Local position of a global index, or -1.
  Index local_index(Index global) const;

  /// A standalone dense front; membership counts start at 1.
  static Front dense(Index id, Eigen::MatrixXd values,
                     std::vector<Index> local_to_global);
};

GlobalSystem assemble_system(const Mesh& mesh, const ScalarFunction& f);

std::vector<Front> generate_fronts(const Mesh& mesh);

/// Sums numeric fronts through their index maps.
GlobalSystem assemble_fronts(std::span<const Front> fronts, Index n_dof,
                             std::vector<double> rhs = {});

/// Coefficients of u_h at the mesh DOFs.
double l2_error(const Mesh& mesh, std::span<const double> coefficients,
                const ScalarFunction& f);

}  // namespace mfront
