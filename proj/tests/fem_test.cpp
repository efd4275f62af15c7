#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <random>

#include "mfront/dense.hpp"
#include "mfront/fem.hpp"

using namespace mfront;

TEST(ReferenceBasis, NodalValues) {
  auto b = reference_basis(1, 0.0);
  EXPECT_DOUBLE_EQ(b[0], 1.0);
  EXPECT_DOUBLE_EQ(b[1], 0.0);
  b = reference_basis(1, 0.5);
  EXPECT_DOUBLE_EQ(b[0], 0.5);
  EXPECT_DOUBLE_EQ(b[1], 0.5);
  b = reference_basis(2, 0.5);
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 1.0, 1e-15);
  EXPECT_NEAR(b[2], 0.0, 1e-15);
}

TEST(ReferenceBasis, KroneckerAtNodes) {
  for (int p = 1; p <= 3; ++p) {
    for (int k = 0; k <= p; ++k) {
      const auto b = reference_basis(p, static_cast<double>(k) / p);
      for (int j = 0; j <= p; ++j) EXPECT_NEAR(b[j], j == k ? 1.0 : 0.0, 1e-14);
    }
  }
}

TEST(ReferenceBasis, PartitionOfUnity) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> xi(0.0, 1.0);
  for (int p = 1; p <= 3; ++p) {
    for (int trial = 0; trial < 200; ++trial) {
      double sum = 0.0;
      for (double v : reference_basis(p, xi(rng))) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-14);
    }
  }
}

TEST(ReferenceBasis, RejectsBadInput) {
  EXPECT_THROW(reference_basis(0, 0.5), UnsupportedDegreeError);
  EXPECT_THROW(reference_basis(4, 0.5), UnsupportedDegreeError);
  EXPECT_THROW(reference_basis(2, 1.5), InvalidGeometryError);
}

TEST(Quadrature, IntegratesPolynomialsExactly) {
  for (int n = 1; n <= 6; ++n) {
    const auto rule = gauss_legendre(n);
    for (int d = 0; d < 2 * n; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.points.size(); ++i) {
        s += rule.weights[i] * std::pow(rule.points[i], d);
      }
      EXPECT_NEAR(s, 1.0 / (d + 1), 1e-14) << "n=" << n << " degree " << d;
    }
  }
  EXPECT_EQ(quadrature_points(1), 3);
  EXPECT_EQ(quadrature_points(3), 5);
}

TEST(ElementMass, LinearElement) {
  const auto m = element_mass_matrix(1.0, 1);
  EXPECT_NEAR(m(0, 0), 2.0 / 6, 1e-15);
  EXPECT_NEAR(m(0, 1), 1.0 / 6, 1e-15);
  EXPECT_NEAR(m(1, 1), 2.0 / 6, 1e-15);
  const auto m2 = element_mass_matrix(2.0, 1);
  EXPECT_NEAR(m2(0, 0), 4.0 / 6, 1e-15);
  EXPECT_NEAR(m2(1, 0), 2.0 / 6, 1e-15);
}

TEST(ElementMass, SymmetricPositiveDefinite) {
  for (int p = 1; p <= 3; ++p) {
    const auto m = element_mass_matrix(0.37, p);
    EXPECT_EQ(m, m.transpose());
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(m).info(), Eigen::Success);
    EXPECT_NEAR(m.sum(), 0.37, 1e-15);
  }
  EXPECT_THROW(element_mass_matrix(0.0, 1), InvalidGeometryError);
  EXPECT_THROW(element_mass_matrix(-1.0, 2), InvalidGeometryError);
}

TEST(ElementLoad, Examples) {
  const auto zero = element_load_vector(1.0, 2, [](double) { return 0.0; }, 0.0);
  EXPECT_EQ(zero, Eigen::VectorXd::Zero(3));
  const auto one = element_load_vector(1.0, 1, [](double) { return 1.0; }, 0.0);
  EXPECT_NEAR(one(0), 0.5, 1e-15);
  EXPECT_NEAR(one(1), 0.5, 1e-15);
  for (int p = 1; p <= 3; ++p) {
    const auto v = element_load_vector(0.25, p, [](double) { return 1.0; }, 0.5);
    EXPECT_NEAR(v.sum(), 0.25, 1e-15);
  }
  EXPECT_THROW(element_load_vector(0.0, 1, [](double) { return 1.0; }, 0.0),
               InvalidGeometryError);
}

TEST(Mesh, Validation) {
  EXPECT_THROW(Mesh(0, 1), InvalidGeometryError);
  EXPECT_THROW(Mesh(2, 4), UnsupportedDegreeError);
  EXPECT_THROW(Mesh(2, 1, 1.0, 1.0), InvalidGeometryError);
  Mesh mesh(3, 2);
  EXPECT_EQ(mesh.n_dof(), 7);
  EXPECT_EQ(mesh.element_dofs(1), (std::vector<Index>{2, 3, 4}));
}

TEST(Assembly, SharedMiddleEntry) {
  const auto system = assemble_system(Mesh(2, 1), make_rhs(RhsFunction::One));
  EXPECT_EQ(system.n_dof(), 3);
  EXPECT_NEAR(system.at(1, 1), 1.0 / 3, 1e-15);
  EXPECT_NEAR(system.at(0, 1), 1.0 / 12, 1e-15);
  EXPECT_EQ(system.at(0, 2), 0.0);
  EXPECT_FALSE(system.contains(0, 2));
}

TEST(Assembly, SingleElementMatchesElementMatrix) {
  const auto system = assemble_system(Mesh(1, 1), make_rhs(RhsFunction::One));
  EXPECT_EQ(system.to_dense(), element_mass_matrix(1.0, 1));
}

TEST(Assembly, RowSumsAndTotalMass) {
  for (int p = 1; p <= 3; ++p) {
    const Mesh mesh(7, p, -1.0, 2.0);
    const auto system = assemble_system(mesh, make_rhs(RhsFunction::One));
    const std::vector<double> ones(system.n_dof(), 1.0);
    const auto product = system.multiply(ones);
    const auto dense = system.to_dense();
    for (Index r = 0; r < system.n_dof(); ++r) {
      EXPECT_NEAR(product[r], dense.row(r).sum(), 1e-15);
    }
    EXPECT_NEAR(system.entry_sum(), 3.0, 1e-13);
    EXPECT_EQ(dense, dense.transpose());
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(dense).info(), Eigen::Success);
  }
}

TEST(Assembly, TripletsSumDuplicates) {
  const auto s = GlobalSystem::from_triplets(
      2, {{0, 0, 1.0}, {1, 1, 2.0}, {0, 0, 0.5}, {1, 0, 3.0}});
  EXPECT_EQ(s.at(0, 0), 1.5);
  EXPECT_EQ(s.at(1, 0), 3.0);
  EXPECT_EQ(s.nnz(), 3u);
  EXPECT_THROW(GlobalSystem::from_triplets(2, {{2, 0, 1.0}}), DimensionMismatchError);
}

TEST(Fronts, MembershipCounts) {
  auto fronts = generate_fronts(Mesh(2, 1));
  ASSERT_EQ(fronts.size(), 2u);
  EXPECT_EQ(fronts[0].membership_count, (std::vector<int>{1, 2}));
  EXPECT_EQ(fronts[1].membership_count, (std::vector<int>{2, 1}));

  fronts = generate_fronts(Mesh(1, 3));
  ASSERT_EQ(fronts.size(), 1u);
  EXPECT_EQ(fronts[0].membership_count, (std::vector<int>{1, 1, 1, 1}));

  fronts = generate_fronts(Mesh(3, 2));
  ASSERT_EQ(fronts.size(), 3u);
  for (const auto& f : fronts) {
    EXPECT_EQ(f.size(), 3);
    EXPECT_EQ(f.membership_count[1], 1);
    EXPECT_EQ(f.values, element_mass_matrix(1.0 / 3, 2));
    EXPECT_EQ(f.computed, std::vector<bool>(3, false));
  }
}

TEST(Fronts, AssemblyConservesMass) {
  const Mesh mesh(9, 3);
  const auto fronts = generate_fronts(mesh);
  double front_sum = 0.0;
  for (const auto& f : fronts) front_sum += f.values.sum();
  const auto system = assemble_system(mesh, make_rhs(RhsFunction::One));
  EXPECT_NEAR(front_sum, system.entry_sum(), 1e-14);
  const auto rebuilt = assemble_fronts(fronts, mesh.n_dof());
  EXPECT_LT((rebuilt.to_dense() - system.to_dense()).norm(), 1e-15);
}

TEST(RhsFunctions, ParseAndEvaluate) {
  EXPECT_EQ(parse_rhs_function("sin_pi"), RhsFunction::SinPi);
  EXPECT_EQ(to_string(RhsFunction::XSquared), "x_squared");
  EXPECT_THROW(parse_rhs_function("cos"), Error);
  EXPECT_DOUBLE_EQ(make_rhs(RhsFunction::XSquared)(3.0), 9.0);
  EXPECT_NEAR(make_rhs(RhsFunction::SinPi)(0.5), 1.0, 1e-15);
}

TEST(Projection, ConvergesAtOptimalRate) {
  const auto f = make_rhs(RhsFunction::SinPi);
  for (int p = 1; p <= 3; ++p) {
    std::vector<double> errors;
    for (Index n : {8, 16, 32, 64}) {
      const Mesh mesh(n, p);
      const auto system = assemble_system(mesh, f);
      const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(
          system.rhs().data(), system.n_dof());
      const auto lu = dense_lu_oracle(system.to_dense(), b);
      errors.push_back(l2_error(
          mesh, std::span(lu.solution.data(), lu.solution.size()), f));
    }
    for (std::size_t k = 1; k < errors.size(); ++k) {
      EXPECT_GE(std::log2(errors[k - 1] / errors[k]), p + 0.8) << "p=" << p;
    }
  }
}
