#pragma once

#include <cstdint>
#include <vector>

#include "dialectoscope/linalg.hpp"

namespace dialectoscope {

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = 1;
  // Final primal objective above this counts as a plateau at the trivial
  // separator (w = 0 scores exactly 1).
  double plateau_threshold = 0.9;
};

/// Linear separator h . x + bias = 0.
struct LinearSvm {
  Vector weights;
  double bias = 0.0;
  double objective = 0.0;  // lambda/2 ||w||^2 + mean hinge loss, bias included in w
  bool converged = true;

  double decision(const Eigen::Ref<const Vector>& x) const { return weights.dot(x) + bias; }
  /// Euclidean distance from x to the hyperplane; 0 for a degenerate (w = 0) model.
  double distance(const Eigen::Ref<const Vector>& x) const;
};

/// Soft-margin hinge-loss SVM trained by Pegasos stochastic subgradient steps
/// over seeded shuffles of the rows, returning the mean iterate of the second
/// half of the steps. The bias is learned as the weight of a
/// constant feature. labels are +1 / -1.
LinearSvm train_linear_svm(const Matrix& rows, const std::vector<int>& labels,
                           const SvmConfig& config);

double svm_objective(const LinearSvm& model, const Matrix& rows, const std::vector<int>& labels,
                     double lambda);

}  // namespace dialectoscope
