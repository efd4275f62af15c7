#include "mfront/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace mfront {

RhsFunction parse_rhs_function(std::string_view name) {
  if (name == "one") return RhsFunction::One;
  if (name == "sin_pi") return RhsFunction::SinPi;
  if (name == "x_squared") return RhsFunction::XSquared;
  throw Error("unknown rhs function '" + std::string(name) +
              "' (expected one, sin_pi, x_squared)");
}

std::string_view to_string(RhsFunction fn) {
  switch (fn) {
    case RhsFunction::One:
      return "one";
    case RhsFunction::SinPi:
      return "sin_pi";
    case RhsFunction::XSquared:
      return "x_squared";
  }
  return "?";
}

ScalarFunction make_rhs(RhsFunction fn) {
  switch (fn) {
    case RhsFunction::One:
      return [](double) { return 1.0; };
    case RhsFunction::SinPi:
      return [](double x) { return std::sin(std::numbers::pi * x); };
    case RhsFunction::XSquared:
      return [](double x) { return x * x; };
  }
  return [](double) { return 0.0; };
}

QuadratureRule gauss_legendre(int n_points) {
  if (n_points < 1) throw Error("quadrature needs at least one point");
  QuadratureRule rule;
  rule.points.resize(n_points);
  rule.weights.resize(n_points);
  const int n = n_points;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Nodes come out descending in x; store ascending on [0, 1].
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

int quadrature_points(int degree) { return (2 * degree + 2 + 1) / 2 + 1; }

void check_degree(int degree) {
  if (degree < 1 || degree > 3) throw UnsupportedDegreeError(degree);
}

Mesh::Mesh(Index n_elements, int degree, double domain_start,
           double domain_end)
    : n_elements_(n_elements),
      degree_(degree),
      domain_start_(domain_start),
      domain_end_(domain_end) {
  check_degree(degree);
  if (n_elements < 1) throw InvalidGeometryError("mesh needs >= 1 element");
  if (!(domain_start < domain_end)) {
    throw InvalidGeometryError("domain_start must be < domain_end");
  }
}

double Mesh::element_left(Index e) const {
  return domain_start_ + element_width() * e;
}

std::vector<Index> Mesh::element_dofs(Index e) const {
  std::vector<Index> dofs(degree_ + 1);
  std::iota(dofs.begin(), dofs.end(), e * degree_);
  return dofs;
}

std::vector<double> reference_basis(int degree, double xi) {
  check_degree(degree);
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw InvalidGeometryError("reference coordinate outside [0, 1]");
  }
  std::vector<double> values(degree + 1, 1.0);
  for (int k = 0; k <= degree; ++k) {
    const double node_k = static_cast<double>(k) / degree;
    for (int m = 0; m <= degree; ++m) {
      if (m == k) continue;
      const double node_m = static_cast<double>(m) / degree;
      values[k] *= (xi - node_m) / (node_k - node_m);
    }
  }
  return values;
}

Eigen::MatrixXd element_mass_matrix(double h, int degree) {
  check_degree(degree);
  if (!(h > 0.0)) throw InvalidGeometryError("element width must be > 0");
  const auto rule = gauss_legendre(quadrature_points(degree));
  const int n = degree + 1;
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto phi = reference_basis(degree, rule.points[q]);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        mass(i, j) += rule.weights[q] * phi[i] * phi[j];
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      mass(i, j) *= h;
      mass(j, i) = mass(i, j);
    }
  }
  return mass;
}

Eigen::VectorXd element_load_vector(double h, int degree,
                                    const ScalarFunction& f,
                                    double element_offset) {
  check_degree(degree);
  if (!(h > 0.0)) throw InvalidGeometryError("element width must be > 0");
  const auto rule = gauss_legendre(quadrature_points(degree));
  Eigen::VectorXd load = Eigen::VectorXd::Zero(degree + 1);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto phi = reference_basis(degree, rule.points[q]);
    const double fx = f(element_offset + h * rule.points[q]);
    for (int i = 0; i <= degree; ++i) {
      load[i] += rule.weights[q] * fx * phi[i];
    }
  }
  return load * h;
}

GlobalSystem GlobalSystem::from_triplets(Index n_dof,
                                         std::vector<SparseEntry> triplets,
                                         std::vector<double> rhs) {
  GlobalSystem sys;
  sys.n_dof_ = n_dof;
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= n_dof || t.col < 0 || t.col >= n_dof) {
      throw DimensionMismatchError("matrix entry outside the system");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const SparseEntry& a, const SparseEntry& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  sys.row_ptr_.assign(n_dof + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    std::size_t m = k;
    double sum = 0.0;
    while (m < triplets.size() && triplets[m].row == triplets[k].row &&
           triplets[m].col == triplets[k].col) {
      sum += triplets[m].value;
      ++m;
    }
    sys.cols_.push_back(triplets[k].col);
    sys.values_.push_back(sum);
    sys.row_ptr_[triplets[k].row + 1]++;
    k = m;
  }
  for (Index r = 0; r < n_dof; ++r) sys.row_ptr_[r + 1] += sys.row_ptr_[r];
  if (rhs.empty()) rhs.assign(n_dof, 0.0);
  sys.set_rhs(std::move(rhs));
  return sys;
}

void GlobalSystem::set_rhs(std::vector<double> rhs) {
  if (static_cast<Index>(rhs.size()) != n_dof_) {
    throw DimensionMismatchError("rhs length differs from n_dof");
  }
  rhs_ = std::move(rhs);
}

std::span<const Index> GlobalSystem::row_cols(Index row) const {
  return {cols_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

std::span<const double> GlobalSystem::row_values(Index row) const {
  return {values_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

bool GlobalSystem::contains(Index row, Index col) const {
  const auto cols = row_cols(row);
  return std::binary_search(cols.begin(), cols.end(), col);
}

double GlobalSystem::at(Index row, Index col) const {
  const auto cols = row_cols(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return row_values(row)[it - cols.begin()];
}

std::vector<double> GlobalSystem::multiply(std::span<const double> x) const {
  if (static_cast<Index>(x.size()) != n_dof_) {
    throw DimensionMismatchError("vector length differs from n_dof");
  }
  std::vector<double> y(n_dof_, 0.0);
  for (Index r = 0; r < n_dof_; ++r) {
    const auto cols = row_cols(r);
    const auto vals = row_values(r);
    double sum = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) sum += vals[k] * x[cols[k]];
    y[r] = sum;
  }
  return y;
}

Eigen::MatrixXd GlobalSystem::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n_dof_, n_dof_);
  for (Index r = 0; r < n_dof_; ++r) {
    const auto cols = row_cols(r);
    const auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) dense(r, cols[k]) = vals[k];
  }
  return dense;
}

double GlobalSystem::max_abs_entry() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GlobalSystem::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double GlobalSystem::entry_sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

std::vector<SparseEntry> GlobalSystem::entries() const {
  std::vector<SparseEntry> out;
  out.reserve(nnz());
  for (Index r = 0; r < n_dof_; ++r) {
    const auto cols = row_cols(r);
    const auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out.push_back({r, cols[k], vals[k]});
    }
  }
  return out;
}

Index Front::min_global() const {
  if (local_to_global.empty()) throw EmptyInputError("front has no indices");
  return *std::min_element(local_to_global.begin(), local_to_global.end());
}

Index Front::local_index(Index global) const {
  const auto it =
      std::find(local_to_global.begin(), local_to_global.end(), global);
  return it == local_to_global.end()
             ? -1
             : static_cast<Index>(it - local_to_global.begin());
}

Front Front::dense(Index id, Eigen::MatrixXd values,
                   std::vector<Index> local_to_global) {
  const auto n = static_cast<Eigen::Index>(local_to_global.size());
  if (values.rows() != n || values.cols() != n) {
    throw DimensionMismatchError("front values do not match its index map");
  }
  auto sorted = local_to_global;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("front index map is not injective");
  }
  Front front;
  front.front_id = id;
  front.values = std::move(values);
  front.membership_count.assign(local_to_global.size(), 1);
  front.computed.assign(local_to_global.size(), false);
  front.local_to_global = std::move(local_to_global);
  return front;
}

GlobalSystem assemble_system(const Mesh& mesh, const ScalarFunction& f) {
  const double h = mesh.element_width();
  const int p = mesh.degree();
  const Eigen::MatrixXd mass = element_mass_matrix(h, p);
  std::vector<SparseEntry> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_elements()) * (p + 1) *
                   (p + 1));
  std::vector<double> rhs(mesh.n_dof(), 0.0);
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = mesh.element_dofs(e);
    const Eigen::VectorXd load =
        element_load_vector(h, p, f, mesh.element_left(e));
    for (int i = 0; i <= p; ++i) {
      rhs[dofs[i]] += load[i];
      for (int j = 0; j <= p; ++j) {
        triplets.push_back({dofs[i], dofs[j], mass(i, j)});
      }
    }
  }
  return GlobalSystem::from_triplets(mesh.n_dof(), std::move(triplets),
                                     std::move(rhs));
}

std::vector<Front> generate_fronts(const Mesh& mesh) {
  const Eigen::MatrixXd mass =
      element_mass_matrix(mesh.element_width(), mesh.degree());
  std::vector<Front> fronts;
  fronts.reserve(mesh.n_elements());
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    Front front = Front::dense(e, mass, mesh.element_dofs(e));
    if (e > 0) front.membership_count.front() = 2;
    if (e + 1 < mesh.n_elements()) front.membership_count.back() = 2;
    fronts.push_back(std::move(front));
  }
  return fronts;
}

GlobalSystem assemble_fronts(std::span<const Front> fronts, Index n_dof,
                             std::vector<double> rhs) {
  std::vector<SparseEntry> triplets;
  for (const auto& front : fronts) {
    if (front.is_symbolic() && front.size() > 0) {
      throw Error("cannot assemble a symbolic front");
    }
    for (Index i = 0; i < front.size(); ++i) {
      for (Index j = 0; j < front.size(); ++j) {
        triplets.push_back({front.local_to_global[i], front.local_to_global[j],
                            front.values(i, j)});
      }
    }
  }
  return GlobalSystem::from_triplets(n_dof, std::move(triplets),
                                     std::move(rhs));
}

double l2_error(const Mesh& mesh, std::span<const double> coefficients,
                const ScalarFunction& f) {
  if (static_cast<Index>(coefficients.size()) != mesh.n_dof()) {
    throw DimensionMismatchError("coefficient count differs from n_dof");
  }
  const auto rule = gauss_legendre(mesh.degree() + 5);
  const double h = mesh.element_width();
  double sum = 0.0;
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const auto dofs = mesh.element_dofs(e);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = reference_basis(mesh.degree(), rule.points[q]);
      double uh = 0.0;
      for (int i = 0; i <= mesh.degree(); ++i) uh += coefficients[dofs[i]] * phi[i];
      const double diff = uh - f(mesh.element_left(e) + h * rule.points[q]);
      sum += rule.weights[q] * h * diff * diff;
    }
  }
  return std::sqrt(sum);
}

}  // namespace mfront
