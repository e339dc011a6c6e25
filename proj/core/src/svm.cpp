#include "dialectoscope/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dialectoscope/error.hpp"
#include "dialectoscope/random.hpp"

namespace dialectoscope {

double LinearSvm::distance(const Eigen::Ref<const Vector>& x) const {
  const double norm = weights.norm();
  if (norm == 0.0) return 0.0;
  return std::abs(decision(x)) / norm;
}

double svm_objective(const LinearSvm& model, const Matrix& rows, const std::vector<int>& labels,
                     double lambda) {
  double hinge = 0.0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double margin = labels[static_cast<std::size_t>(r)] *
                          (rows.row(r).dot(model.weights) + model.bias);
    hinge += std::max(0.0, 1.0 - margin);
  }
  const double reg = model.weights.squaredNorm() + model.bias * model.bias;
  return 0.5 * lambda * reg + hinge / static_cast<double>(rows.rows());
}

LinearSvm train_linear_svm(const Matrix& rows, const std::vector<int>& labels,
                           const SvmConfig& config) {
  if (rows.rows() == 0) throw DataError("SVM needs at least one training row");
  if (static_cast<Eigen::Index>(labels.size()) != rows.rows()) {
    throw DataError("SVM label count does not match row count");
  }
  for (int y : labels)
    if (y != 1 && y != -1) throw DataError("SVM labels must be +1 or -1");
  if (!(config.lambda > 0.0)) throw ConfigError("svm lambda must be > 0");
  if (config.epochs < 1) throw ConfigError("svm epochs must be >= 1");

  const Eigen::Index dim = rows.cols();
  // w[0..dim) are feature weights, w[dim] multiplies the constant feature 1.
  Vector w = Vector::Zero(dim + 1);
  const double radius = 1.0 / std::sqrt(config.lambda);
  std::vector<std::size_t> order(static_cast<std::size_t>(rows.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);
  std::uint64_t t = 0;
  // Suffix averaging: the model is the mean iterate over the second half of
  // the steps, which removes most of the last iterate's step-size noise.
  const auto total = static_cast<std::uint64_t>(config.epochs) * order.size();
  const std::uint64_t average_from = total / 2;
  Vector sum = Vector::Zero(dim + 1);
  std::uint64_t averaged = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      ++t;
      const auto r = static_cast<Eigen::Index>(idx);
      const double y = labels[idx];
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const double margin = y * (rows.row(r).dot(w.head(dim)) + w[dim]);
      w *= 1.0 - eta * config.lambda;
      if (margin < 1.0) {
        w.head(dim) += (eta * y) * rows.row(r).transpose();
        w[dim] += eta * y;
      }
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
      if (t > average_from) {
        sum += w;
        ++averaged;
      }
    }
  }
  w = sum / static_cast<double>(averaged);
  if (!w.allFinite()) throw NumericError("SVM training produced non-finite weights");

  LinearSvm model;
  model.weights = w.head(dim);
  model.bias = w[dim];
  model.objective = svm_objective(model, rows, labels, config.lambda);
  model.converged = model.objective <= config.plateau_threshold;
  return model;
}

}  // namespace dialectoscope
