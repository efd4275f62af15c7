#pragma once

#include <Eigen/Dense>

#include "mfront/error.hpp"

namespace mfront {

/// Blocks of B = [[C, D], [E, -F]] with C of size q and F of size r.
struct SchurBlocks {
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  Eigen::MatrixXd E;
  Eigen::MatrixXd F;
};

/// In-place LU without pivoting: unit-lower multipliers below the diagonal,
/// U on and above it. Throws ZeroPivotError (front -1) when a pivot falls
/// to or below 1e-14 times the largest input magnitude.
void lu_in_place(Eigen::MatrixXd& a);

/// Solves with a matrix factored by lu_in_place.
Eigen::MatrixXd lu_solve(const Eigen::MatrixXd& factored,
                         const Eigen::MatrixXd& rhs);

/// -(F + E C^{-1} D), the block left after eliminating C.
Eigen::MatrixXd schur_complement_dense(const SchurBlocks& blocks);

struct DenseLu {
  Eigen::MatrixXd lower;  // unit lower triangular
  Eigen::MatrixXd upper;
  Eigen::VectorXd solution;
};

/// Textbook Gaussian elimination without pivoting. Verification only.
DenseLu dense_lu_oracle(const Eigen::MatrixXd& matrix,
                        const Eigen::VectorXd& rhs);

}  // namespace mfront
