#include "mfront/dense.hpp"

namespace mfront {

void lu_in_place(Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionMismatchError("LU needs a square matrix");
  const Eigen::Index n = a.rows();
  const double threshold = 1e-14 * (n > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double pivot = a(k, k);
    if (std::abs(pivot) <= threshold) {
      throw ZeroPivotError(-1, static_cast<Index>(k), pivot);
    }
    const Eigen::Index m = n - k - 1;
    if (m == 0) break;
    a.col(k).tail(m) /= pivot;
    a.bottomRightCorner(m, m).noalias() -=
        a.col(k).tail(m) * a.row(k).tail(m);
  }
}

Eigen::MatrixXd lu_solve(const Eigen::MatrixXd& factored,
                         const Eigen::MatrixXd& rhs) {
  if (rhs.rows() != factored.rows()) {
    throw DimensionMismatchError("rhs rows differ from matrix size");
  }
  Eigen::MatrixXd x = rhs;
  factored.triangularView<Eigen::UnitLower>().solveInPlace(x);
  factored.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Eigen::MatrixXd schur_complement_dense(const SchurBlocks& blocks) {
  const auto q = blocks.C.rows();
  const auto r = blocks.F.rows();
  if (blocks.C.cols() != q || blocks.F.cols() != r || blocks.D.rows() != q ||
      blocks.D.cols() != r || blocks.E.rows() != r || blocks.E.cols() != q) {
    throw DimensionMismatchError("inconsistent Schur block shapes");
  }
  Eigen::MatrixXd c = blocks.C;
  lu_in_place(c);
  const Eigen::MatrixXd c_inv_d = lu_solve(c, blocks.D);
  return -(blocks.F + blocks.E * c_inv_d);
}

DenseLu dense_lu_oracle(const Eigen::MatrixXd& matrix,
                        const Eigen::VectorXd& rhs) {
  Eigen::MatrixXd a = matrix;
  lu_in_place(a);
  DenseLu out;
  out.lower = a.triangularView<Eigen::UnitLower>();
  out.upper = a.triangularView<Eigen::Upper>();
  out.solution = lu_solve(a, rhs);
  return out;
}

}  // namespace mfront
