#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dialectoscope/align.hpp"
#include "dialectoscope/corpus.hpp"
#include "dialectoscope/embedding.hpp"
#include "dialectoscope/linalg.hpp"

namespace testutil {

using dialectoscope::Matrix;

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline Matrix random_orthogonal(std::mt19937_64& rng, Eigen::Index d) {
  const Eigen::MatrixXd a = gaussian(rng, d, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  // Fix column signs so q is Haar-distributed rather than biased by QR.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k)
    if (r(k, k) < 0) q.col(k) *= -1.0;
  return q;
}

inline std::vector<std::string> tokens(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

inline dialectoscope::EmbeddingSet embedding(const Matrix& m) {
  return {tokens(static_cast<std::size_t>(m.rows())), m, false};
}

/// Pair whose aligned rows are given directly (already unit length or not).
inline dialectoscope::AlignedPair pair_of(const Matrix& a, const Matrix& b) {
  dialectoscope::AlignedPair p;
  p.first = {tokens(static_cast<std::size_t>(a.rows())), a, false};
  p.second = {tokens(static_cast<std::size_t>(b.rows())), b, false};
  return p;
}

inline dialectoscope::AlignedPair unit_pair(const Matrix& a, const Matrix& b) {
  auto p = pair_of(dialectoscope::normalize_rows(a), dialectoscope::normalize_rows(b));
  p.first.normalized = p.second.normalized = true;
  return p;
}

/// Dense symmetric matrix -> CoocMatrix (entries <= 0 are dropped).
inline dialectoscope::CoocMatrix cooc_from_dense(const Eigen::MatrixXd& c) {
  std::vector<dialectoscope::CoocEntry> upper;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = i; j < c.cols(); ++j)
      if (c(i, j) > 0)
        upper.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), c(i, j)});
  return dialectoscope::CoocMatrix::from_upper(static_cast<std::size_t>(c.rows()), upper);
}

/// Random symmetric nonnegative integer matrix with roughly `density` nonzeros.
inline Eigen::MatrixXd random_counts(std::mt19937_64& rng, Eigen::Index n, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> k(1, 40);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      if (u(rng) < density) c(i, j) = c(j, i) = k(rng);
  return c;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("dialectoscope_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
