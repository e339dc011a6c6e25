#pragma once

// Brute-force reference computations shared by the unit and acceptance tests.
// They work on dense matrices with plain loops and reuse nothing from the
// library except the Matrix type.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Dense = Eigen::MatrixXd;

inline double dot_row(const Dense& m, Eigen::Index r, const std::vector<double>& v) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < m.cols(); ++k) s += m(r, k) * v[static_cast<std::size_t>(k)];
  return s;
}

inline std::vector<double> unit_offset(const Dense& a, const Dense& b, Eigen::Index focal,
                                       double& norm) {
  std::vector<double> o(static_cast<std::size_t>(a.cols()));
  norm = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    o[static_cast<std::size_t>(k)] = a(focal, k) - b(focal, k);
    norm += o[static_cast<std::size_t>(k)] * o[static_cast<std::size_t>(k)];
  }
  norm = std::sqrt(norm);
  for (auto& x : o) x /= norm;
  return o;
}

struct Projections {
  std::vector<double> alpha1, alpha2;
};

inline Projections project(const Dense& a, const Dense& b, Eigen::Index focal) {
  double norm = 0.0;
  const auto u = unit_offset(a, b, focal, norm);
  Projections p;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    p.alpha1.push_back(dot_row(a, r, u));
    p.alpha2.push_back(dot_row(b, r, u));
  }
  return p;
}

inline double ec(const Dense& c, Eigen::Index i, Eigen::Index j) {
  if (c(i, j) == 0.0) return 0.0;
  double total = 0.0, ri = 0.0, rj = 0.0;
  for (Eigen::Index p = 0; p < c.rows(); ++p)
    for (Eigen::Index q = 0; q < c.cols(); ++q) total += c(p, q);
  for (Eigen::Index q = 0; q < c.cols(); ++q) {
    ri += c(i, q);
    rj += c(j, q);
  }
  return c(i, j) * total / (ri * rj);
}

/// Sense separation from the full projection matrices: every alpha computed
/// as one matrix product, then averaged over the HC sets.
inline std::optional<double> sense_separation(const Dense& a, const Dense& b, const Dense& c1,
                                              const Dense& c2, Eigen::Index focal) {
  double norm = 0.0;
  const auto u = unit_offset(a, b, focal, norm);
  if (!(norm > 1e-12)) return std::nullopt;
  const Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXd diag = 0.5 * (a * uv + b * uv);
  double s1 = 0.0, s2 = 0.0;
  int n1 = 0, n2 = 0;
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    if (j == focal) continue;
    const double e1 = ec(c1, focal, j), e2 = ec(c2, focal, j);
    if (e1 > 1.0 && e2 <= 1.0) s1 += diag(j), ++n1;
    if (e2 > 1.0 && e1 <= 1.0) s2 += diag(j), ++n2;
  }
  if (n1 == 0 || n2 == 0) return std::nullopt;
  return s1 / n1 - s2 / n2;
}

/// Average ranks by counting, O(n^2).
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : x) {
      if (y < x[i]) ++less;
      if (y == x[i]) ++equal;
    }
    r[i] = less + (equal + 1) / 2.0;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

/// score_j = #{focal : m > t} - #{focal : m < -t}, focal offsets of zero skipped.
inline std::vector<int> aggregate(const Dense& a, const Dense& b,
                                  const std::vector<Eigen::Index>& focals, double t) {
  std::vector<int> score(static_cast<std::size_t>(a.rows()), 0);
  for (auto f : focals) {
    double norm = 0.0;
    const auto u = unit_offset(a, b, f, norm);
    if (!(norm > 1e-12)) continue;
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      const double m = 0.5 * (dot_row(a, j, u) + dot_row(b, j, u));
      if (m > t) ++score[static_cast<std::size_t>(j)];
      if (m < -t) --score[static_cast<std::size_t>(j)];
    }
  }
  return score;
}

}  // namespace oracle
