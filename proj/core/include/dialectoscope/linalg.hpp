#pragma once

#include <Eigen/Dense>

namespace dialectoscope {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Thin SVD  A = U diag(S) V^T  with singular values non-increasing and a
/// fixed sign convention: the largest-magnitude component of each left
/// singular vector is positive (the matching right vector flips with it).
struct Svd {
  Eigen::MatrixXd u;
  Vector s;
  Eigen::MatrixXd v;
};

/// Throws NumericError if the decomposition fails or produces non-finite
/// values.
Svd thin_svd(const Eigen::Ref<const Eigen::MatrixXd>& a);

double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Rows scaled to unit L2 norm. Throws DataError on an exactly-zero row.
Matrix normalize_rows(const Matrix& m);

}  // namespace dialectoscope
