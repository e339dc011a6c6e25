#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dialectoscope/corpus.hpp"
#include "dialectoscope/embedding.hpp"
#include "dialectoscope/linalg.hpp"

namespace dialectoscope {

enum class Weighting {
  Default,   // (x / x_max)^alpha below x_max, 1 above
  Uniform,   // every stored pair weighted 1
  Inverted,  // experimental: 1 - min(x / x_max, 1)^alpha, floored at 0.01
};

Weighting parse_weighting(const std::string& name);
std::string to_string(Weighting w);

struct GloveConfig {
  int dim = 300;
  int epochs = 30;
  double x_max = 100.0;
  double alpha = 0.75;
  double learning_rate = 0.05;
  Weighting weighting = Weighting::Default;
  std::uint64_t seed = 1;
  // 1 = deterministic. More threads apply lock-free (Hogwild) updates and
  // give up bit-reproducibility.
  int threads = 1;
  // Per-pair weighted residual is clipped to +-grad_clip during training.
  double grad_clip = 100.0;

  void validate() const;
};

struct GloveParams {
  Matrix word;     // W, N x D
  Matrix context;  // W~, N x D
  Vector word_bias;
  Vector context_bias;
  // AdaGrad accumulators, same shapes.
  Matrix word_sq;
  Matrix context_sq;
  Vector word_bias_sq;
  Vector context_bias_sq;

  std::size_t size() const { return static_cast<std::size_t>(word.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(word.cols()); }
};

double weight_fn(double x, const GloveConfig& config);

/// Uniform(-0.5/D, 0.5/D) vectors and biases, accumulators at 1.
GloveParams init_params(std::size_t n, const GloveConfig& config);

/// Residual w_i . w~_j + b_i + b~_j - log x.
double pair_residual(const GloveParams& p, std::size_t i, std::size_t j, double x);

/// f(x) * residual^2 for one (i, j) cell.
double pair_loss(const GloveParams& p, std::size_t i, std::size_t j, double x,
                 const GloveConfig& config);

/// Sum over all stored cells (both triangles) of f(X_ij) * residual^2.
double loss(const GloveParams& p, const CoocMatrix& cooc, const GloveConfig& config);

/// Gradient of pair_loss with respect to the four parameter blocks it touches.
struct PairGradient {
  Vector word;     // d/dw_i
  Vector context;  // d/dw~_j
  double word_bias = 0.0;
  double context_bias = 0.0;
};
PairGradient pair_gradient(const GloveParams& p, std::size_t i, std::size_t j, double x,
                           const GloveConfig& config);

/// Gradient of `loss` with respect to all parameters, assembled from
/// pair_gradient. Returned in a GloveParams-shaped struct (accumulators unused).
GloveParams loss_gradient(const GloveParams& p, const CoocMatrix& cooc,
                          const GloveConfig& config);

struct TrainResult {
  GloveParams params;
  // loss_trace[0] is the mean loss at initialization; entry e (>= 1) is the
  // mean per-pair loss accumulated during epoch e.
  std::vector<double> loss_trace;
};

/// AdaGrad over every stored cell, visiting cells in a freshly shuffled order
/// each epoch. Throws NumericError if the loss becomes non-finite.
TrainResult train(const CoocMatrix& cooc, const GloveConfig& config);

/// Runs `epochs` more passes starting from `params`.
void train_epochs(GloveParams& params, const CoocMatrix& cooc, const GloveConfig& config,
                  std::vector<double>& loss_trace);

/// Row i = w_i + w~_i, optionally scaled to unit length (DataError on a zero
/// row when normalizing).
EmbeddingSet finalize_embedding(const GloveParams& params, std::vector<std::string> tokens,
                                bool normalize);

std::string serialize_loss_trace(const std::vector<double>& trace);
void write_loss_trace(const std::vector<double>& trace, const std::filesystem::path& path,
                      bool compress = false);

}  // namespace dialectoscope
