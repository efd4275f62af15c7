#include <gtest/gtest.h>

#include <random>

#include "mfront/dense.hpp"
#include "support/reference.hpp"

using namespace mfront;

namespace {

using support::random_dense;
using support::random_spd;

}  // namespace

TEST(Schur, DecoupledBlocks) {
  Eigen::MatrixXd f(2, 2);
  f << 1, 2, 3, 4;
  const SchurBlocks b{Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 2),
                      Eigen::MatrixXd::Zero(2, 3), f};
  EXPECT_EQ(schur_complement_dense(b), -f);
}

TEST(Schur, Scalar) {
  const SchurBlocks b{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Ones(1, 1),
                      Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1)};
  EXPECT_DOUBLE_EQ(schur_complement_dense(b)(0, 0), -0.5);
}

TEST(Schur, SymmetricCase) {
  std::mt19937 rng(11);
  const Eigen::MatrixXd c = random_spd(4, rng);
  const Eigen::MatrixXd d = random_dense(4, 3, rng);
  const SchurBlocks b{c, d, d.transpose(), Eigen::MatrixXd::Zero(3, 3)};
  const auto s = schur_complement_dense(b);
  EXPECT_LT((s - s.transpose()).norm(), 1e-12 * s.norm());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-0.5 * (s + s.transpose()));
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LE(support::schur_reconstruction_error(b, s), 1e-12);
}

TEST(Schur, RandomReconstruction) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> size(1, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = size(rng), r = size(rng);
    const SchurBlocks b{random_spd(q, rng), random_dense(q, r, rng),
                        random_dense(r, q, rng), random_dense(r, r, rng)};
    EXPECT_LE(support::schur_reconstruction_error(b, schur_complement_dense(b)), 1e-12) << trial;
  }
}

TEST(Schur, RejectsBadShapes) {
  const SchurBlocks b{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(3, 2),
                      Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
  EXPECT_THROW(schur_complement_dense(b), DimensionMismatchError);
  const SchurBlocks singular{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1),
                             Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)};
  EXPECT_THROW(schur_complement_dense(singular), ZeroPivotError);
}

TEST(DenseOracle, HandExamples) {
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  const auto lu = dense_lu_oracle(m, Eigen::Vector2d(3, 3));
  EXPECT_NEAR(lu.solution(0), 1.0, 1e-15);
  EXPECT_NEAR(lu.solution(1), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(lu.lower(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(lu.upper(1, 1), 1.5);

  const auto id = dense_lu_oracle(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(id.lower, Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(id.upper, Eigen::MatrixXd::Identity(3, 3));
}

TEST(DenseOracle, Hilbert) {
  Eigen::MatrixXd h(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) h(i, j) = 1.0 / (i + j + 1);
  }
  const auto lu = dense_lu_oracle(h, h.rowwise().sum());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(lu.solution(i), 1.0, 1e-8);
  Eigen::MatrixXd singular(2, 2);
  singular << 1, 1, 1, 1;
  EXPECT_THROW(dense_lu_oracle(singular, Eigen::Vector2d(1, 1)), ZeroPivotError);
}
