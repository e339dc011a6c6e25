#include "dialectoscope/linalg.hpp"

#include <Eigen/SVD>

#include "dialectoscope/error.hpp"

namespace dialectoscope {

Svd thin_svd(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (a.rows() == 0 || a.cols() == 0) throw NumericError("SVD of an empty matrix");
  if (!a.allFinite()) throw NumericError("SVD input contains non-finite values");
  Svd out;
  // Jacobi is slower but accurate to machine precision on the small (D x D)
  // and tall-thin (N x D) matrices used here.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("SVD failed to converge");
  out.u = svd.matrixU();
  out.s = svd.singularValues();
  out.v = svd.matrixV();
  for (Eigen::Index k = 0; k < out.u.cols(); ++k) {
    Eigen::Index arg = 0;
    out.u.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, k) < 0.0) {
      out.u.col(k) *= -1.0;
      out.v.col(k) *= -1.0;
    }
  }
  if (!out.u.allFinite() || !out.v.allFinite() || !out.s.allFinite()) {
    throw NumericError("SVD produced non-finite values");
  }
  return out;
}

double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm == 0.0) {
      throw DataError("cannot normalize: row " + std::to_string(i) + " is the zero vector");
    }
    out.row(i) /= norm;
  }
  return out;
}

}  // namespace dialectoscope
