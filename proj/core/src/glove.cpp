#include "dialectoscope/glove.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dialectoscope/error.hpp"
#include "dialectoscope/random.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

struct TrainPair {
  std::uint32_t i;
  std::uint32_t j;
  double x;
};

std::vector<TrainPair> collect_pairs(const CoocMatrix& cooc) {
  std::vector<TrainPair> pairs;
  pairs.reserve(cooc.nnz());
  for (std::size_t i = 0; i < cooc.size(); ++i) {
    const auto cols = cooc.row_cols(i);
    const auto vals = cooc.row_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      pairs.push_back({static_cast<std::uint32_t>(i), cols[k], vals[k]});
  }
  return pairs;
}

// One AdaGrad step on a single cell; returns f(x) * residual^2 before the step.
double update_pair(GloveParams& p, const TrainPair& pair, const GloveConfig& config) {
  const std::size_t dim = p.dim();
  double* wi = p.word.row(pair.i).data();
  double* cj = p.context.row(pair.j).data();
  double* gwi = p.word_sq.row(pair.i).data();
  double* gcj = p.context_sq.row(pair.j).data();

  double dot = 0.0;
  for (std::size_t k = 0; k < dim; ++k) dot += wi[k] * cj[k];
  const double residual =
      dot + p.word_bias[pair.i] + p.context_bias[pair.j] - std::log(pair.x);
  const double f = weight_fn(pair.x, config);
  const double cost = f * residual * residual;
  if (!std::isfinite(cost)) return cost;

  // Step on 1/2 f r^2, with the learning rate folded into the accumulated
  // squares as in the reference GloVe trainer.
  double fdiff = std::clamp(f * residual, -config.grad_clip, config.grad_clip);
  fdiff *= config.learning_rate;
  for (std::size_t k = 0; k < dim; ++k) {
    const double t1 = fdiff * cj[k];
    const double t2 = fdiff * wi[k];
    wi[k] -= t1 / std::sqrt(gwi[k]);
    cj[k] -= t2 / std::sqrt(gcj[k]);
    gwi[k] += t1 * t1;
    gcj[k] += t2 * t2;
  }
  p.word_bias[pair.i] -= fdiff / std::sqrt(p.word_bias_sq[pair.i]);
  p.context_bias[pair.j] -= fdiff / std::sqrt(p.context_bias_sq[pair.j]);
  p.word_bias_sq[pair.i] += fdiff * fdiff;
  p.context_bias_sq[pair.j] += fdiff * fdiff;
  return cost;
}

}  // namespace

Weighting parse_weighting(const std::string& name) {
  if (name == "default") return Weighting::Default;
  if (name == "uniform") return Weighting::Uniform;
  if (name == "inverted") return Weighting::Inverted;
  throw ConfigError("unknown weighting mode '" + name + "' (default|uniform|inverted)");
}

std::string to_string(Weighting w) {
  switch (w) {
    case Weighting::Default: return "default";
    case Weighting::Uniform: return "uniform";
    case Weighting::Inverted: return "inverted";
  }
  return "default";
}

void GloveConfig::validate() const {
  if (dim < 1) throw ConfigError("glove dim must be >= 1");
  if (epochs < 1) throw ConfigError("glove epochs must be >= 1");
  if (!(x_max > 0.0)) throw ConfigError("glove x_max must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("glove alpha must be in (0, 1]");
  if (!(learning_rate > 0.0)) throw ConfigError("glove learning_rate must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

double weight_fn(double x, const GloveConfig& config) {
  switch (config.weighting) {
    case Weighting::Uniform:
      return 1.0;
    case Weighting::Inverted:
      return std::max(0.01, 1.0 - std::pow(std::min(x / config.x_max, 1.0), config.alpha));
    case Weighting::Default:
      break;
  }
  return x < config.x_max ? std::pow(x / config.x_max, config.alpha) : 1.0;
}

GloveParams init_params(std::size_t n, const GloveConfig& config) {
  config.validate();
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(config.dim);
  const double half = 0.5 / config.dim;
  Rng rng(config.seed);
  GloveParams p;
  p.word.resize(rows, cols);
  p.context.resize(rows, cols);
  p.word_bias.resize(rows);
  p.context_bias.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) p.word(i, k) = rng.uniform(-half, half);
    p.word_bias[i] = rng.uniform(-half, half);
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) p.context(i, k) = rng.uniform(-half, half);
    p.context_bias[i] = rng.uniform(-half, half);
  }
  p.word_sq = Matrix::Ones(rows, cols);
  p.context_sq = Matrix::Ones(rows, cols);
  p.word_bias_sq = Vector::Ones(rows);
  p.context_bias_sq = Vector::Ones(rows);
  return p;
}

double pair_residual(const GloveParams& p, std::size_t i, std::size_t j, double x) {
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  return p.word.row(ii).dot(p.context.row(jj)) + p.word_bias[ii] + p.context_bias[jj] -
         std::log(x);
}

double pair_loss(const GloveParams& p, std::size_t i, std::size_t j, double x,
                 const GloveConfig& config) {
  const double r = pair_residual(p, i, j, x);
  return weight_fn(x, config) * r * r;
}

double loss(const GloveParams& p, const CoocMatrix& cooc, const GloveConfig& config) {
  if (p.size() != cooc.size()) throw DataError("parameter and co-occurrence sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < cooc.size(); ++i) {
    const auto cols = cooc.row_cols(i);
    const auto vals = cooc.row_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) total += pair_loss(p, i, cols[k], vals[k], config);
  }
  return total;
}

PairGradient pair_gradient(const GloveParams& p, std::size_t i, std::size_t j, double x,
                           const GloveConfig& config) {
  const double g = 2.0 * weight_fn(x, config) * pair_residual(p, i, j, x);
  PairGradient out;
  out.word = g * p.context.row(static_cast<Eigen::Index>(j)).transpose();
  out.context = g * p.word.row(static_cast<Eigen::Index>(i)).transpose();
  out.word_bias = g;
  out.context_bias = g;
  return out;
}

GloveParams loss_gradient(const GloveParams& p, const CoocMatrix& cooc,
                          const GloveConfig& config) {
  GloveParams g;
  g.word = Matrix::Zero(p.word.rows(), p.word.cols());
  g.context = Matrix::Zero(p.context.rows(), p.context.cols());
  g.word_bias = Vector::Zero(p.word_bias.size());
  g.context_bias = Vector::Zero(p.context_bias.size());
  for (std::size_t i = 0; i < cooc.size(); ++i) {
    const auto cols = cooc.row_cols(i);
    const auto vals = cooc.row_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto pg = pair_gradient(p, i, cols[k], vals[k], config);
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(cols[k]);
      g.word.row(ii) += pg.word.transpose();
      g.context.row(jj) += pg.context.transpose();
      g.word_bias[ii] += pg.word_bias;
      g.context_bias[jj] += pg.context_bias;
    }
  }
  return g;
}

void train_epochs(GloveParams& params, const CoocMatrix& cooc, const GloveConfig& config,
                  std::vector<double>& loss_trace) {
  config.validate();
  if (cooc.nnz() == 0) throw DataError("cannot train on an empty co-occurrence matrix");
  if (params.size() != cooc.size()) throw DataError("parameter and co-occurrence sizes differ");
  auto pairs = collect_pairs(cooc);
  const double n_pairs = static_cast<double>(pairs.size());
  // A separate stream from initialization so both are reproducible.
  Rng rng(derive_seed(config.seed, 0x5eed));
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.threads), pairs.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<TrainPair>(pairs));
    double epoch_cost = 0.0;
    if (threads <= 1) {
      for (const auto& pair : pairs) epoch_cost += update_pair(params, pair, config);
    } else {
      std::vector<double> partial(threads, 0.0);
      std::vector<std::thread> workers;
      for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
          const std::size_t begin = pairs.size() * t / threads;
          const std::size_t end = pairs.size() * (t + 1) / threads;
          double c = 0.0;
          for (std::size_t k = begin; k < end; ++k) c += update_pair(params, pairs[k], config);
          partial[t] = c;
        });
      }
      for (auto& w : workers) w.join();
      for (double c : partial) epoch_cost += c;
    }
    const double mean = epoch_cost / n_pairs;
    if (!std::isfinite(mean)) {
      throw NumericError("GloVe training diverged in epoch " +
                         std::to_string(loss_trace.size()) + " (non-finite loss)");
    }
    loss_trace.push_back(mean);
  }
}

TrainResult train(const CoocMatrix& cooc, const GloveConfig& config) {
  config.validate();
  if (cooc.nnz() == 0) throw DataError("cannot train on an empty co-occurrence matrix");
  TrainResult result;
  result.params = init_params(cooc.size(), config);
  result.loss_trace.push_back(loss(result.params, cooc, config) / static_cast<double>(cooc.nnz()));
  train_epochs(result.params, cooc, config, result.loss_trace);
  return result;
}

EmbeddingSet finalize_embedding(const GloveParams& params, std::vector<std::string> tokens,
                                bool normalize) {
  if (tokens.size() != params.size()) throw DataError("token count does not match parameters");
  EmbeddingSet e;
  e.tokens = std::move(tokens);
  e.vectors = params.word + params.context;
  if (normalize) {
    e.vectors = normalize_rows(e.vectors);
    e.normalized = true;
  }
  return e;
}

std::string serialize_loss_trace(const std::vector<double>& trace) {
  std::string out = "epoch,mean_loss\n";
  for (std::size_t e = 0; e < trace.size(); ++e) {
    out += std::to_string(e);
    out += ',';
    out += format_real(trace[e], 17);
    out += '\n';
  }
  return out;
}

void write_loss_trace(const std::vector<double>& trace, const std::filesystem::path& path,
                      bool compress) {
  write_file(path, serialize_loss_trace(trace), compress);
}

}  // namespace dialectoscope
