#include "dialectoscope/align.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "dialectoscope/error.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr Eigen::Index kTranslateBlock = 256;

void require_same_shape(const EmbeddingSet& e1, const EmbeddingSet& e2) {
  if (e1.size() != e2.size() || e1.dim() != e2.dim()) {
    throw DataError("embeddings differ in shape: " + std::to_string(e1.size()) + "x" +
                    std::to_string(e1.dim()) + " vs " + std::to_string(e2.size()) + "x" +
                    std::to_string(e2.dim()));
  }
  if (e1.size() == 0 || e1.dim() == 0) throw DataError("cannot align empty embeddings");
  if (e1.tokens != e2.tokens) throw DataError("embeddings are bound to different vocabularies");
}

AlignedPair make_pair(const EmbeddingSet& e1, const EmbeddingSet& e2, AlignMethod method,
                      Matrix t1, Matrix t2) {
  AlignedPair out;
  out.method = method;
  out.first = {e1.tokens, normalize_rows(e1.vectors * t1), true};
  out.second = {e2.tokens, normalize_rows(e2.vectors * t2), true};
  out.transform1 = std::move(t1);
  out.transform2 = std::move(t2);
  out.residual = (out.first.vectors - out.second.vectors).norm();
  return out;
}

// Block of source rows against all target rows; best[r] receives the argmax
// for source row `begin + r`.
void translate_block(const Matrix& source, const Matrix& target, Eigen::Index begin,
                     Eigen::Index end, std::vector<std::size_t>& best) {
  const Eigen::MatrixXd sims = source.middleRows(begin, end - begin) * target.transpose();
  for (Eigen::Index r = 0; r < sims.rows(); ++r) {
    Eigen::Index arg = 0;
    double top = sims(r, 0);
    for (Eigen::Index c = 1; c < sims.cols(); ++c) {
      if (sims(r, c) > top) {
        top = sims(r, c);
        arg = c;
      }
    }
    best[static_cast<std::size_t>(begin + r)] = static_cast<std::size_t>(arg);
  }
}

const Matrix& unit_rows(const EmbeddingSet& e, Matrix& scratch) {
  if (e.normalized) return e.vectors;
  scratch = normalize_rows(e.vectors);
  return scratch;
}

}  // namespace

AlignMethod parse_align_method(const std::string& name) {
  if (name == "procrustes") return AlignMethod::Procrustes;
  if (name == "cca") return AlignMethod::Cca;
  if (name == "least_squares") return AlignMethod::LeastSquares;
  throw ConfigError("unknown alignment method '" + name + "' (procrustes|cca|least_squares)");
}

std::string to_string(AlignMethod m) {
  switch (m) {
    case AlignMethod::Procrustes: return "procrustes";
    case AlignMethod::Cca: return "cca";
    case AlignMethod::LeastSquares: return "least_squares";
  }
  return "procrustes";
}

FrequencyAdjustment frequency_direction(const Matrix& e, const std::vector<double>& log_freqs) {
  if (static_cast<Eigen::Index>(log_freqs.size()) != e.rows()) {
    throw DataError("frequency vector length " + std::to_string(log_freqs.size()) +
                    " does not match " + std::to_string(e.rows()) + " embedding rows");
  }
  const Eigen::Map<const Vector> f(log_freqs.data(), e.rows());
  if (!f.allFinite()) throw DataError("log frequencies must be finite");
  const Vector w = e.transpose() * f;
  const double norm = w.norm();
  if (!(norm >= 1e-12)) {
    throw DataError("degenerate frequency direction (||E^T f|| = " + format_real(norm, 6) + ")");
  }
  return {w / norm, norm};
}

EmbeddingSet apply_frequency_adjustment(const EmbeddingSet& e, const FrequencyAdjustment& adj) {
  if (adj.direction.size() != e.vectors.cols()) {
    throw DataError("frequency direction has the wrong dimension");
  }
  EmbeddingSet out;
  out.tokens = e.tokens;
  const Vector along = e.vectors * adj.direction;
  out.vectors = e.vectors - along * adj.direction.transpose();
  out.normalized = false;
  return out;
}

EmbeddingSet frequency_adjust(const EmbeddingSet& e, const std::vector<double>& log_freqs,
                              FrequencyAdjustment* adjustment) {
  const auto adj = frequency_direction(e.vectors, log_freqs);
  if (adjustment != nullptr) *adjustment = adj;
  return apply_frequency_adjustment(e, adj);
}

Matrix procrustes_rotation(const Matrix& e1, const Matrix& e2) {
  const Svd svd = thin_svd(e2.transpose() * e1);
  return svd.u * svd.v.transpose();
}

AlignedPair procrustes_align(const EmbeddingSet& e1, const EmbeddingSet& e2) {
  require_same_shape(e1, e2);
  const Svd svd = thin_svd(e2.vectors.transpose() * e1.vectors);
  return make_pair(e1, e2, AlignMethod::Procrustes, svd.v, svd.u);
}

AlignedPair cca_align(const EmbeddingSet& e1, const EmbeddingSet& e2) {
  require_same_shape(e1, e2);
  if (e1.size() < e1.dim()) throw DataError("CCA needs at least as many words as dimensions");
  const Svd s1 = thin_svd(e1.vectors);
  const Svd s2 = thin_svd(e2.vectors);
  const auto check_rank = [](const Svd& s, const char* which) {
    if (s.s.minCoeff() < kRankTolerance) {
      throw DataError(std::string("CCA: ") + which + " embedding is rank deficient (sigma_min = " +
                      format_real(s.s.minCoeff(), 6) + ")");
    }
  };
  check_rank(s1, "first");
  check_rank(s2, "second");
  const Svd inner = thin_svd(s2.u.transpose() * s1.u);
  const Matrix t1 = s1.v * s1.s.cwiseInverse().asDiagonal() * inner.v;
  const Matrix t2 = s2.v * s2.s.cwiseInverse().asDiagonal() * inner.u;
  return make_pair(e1, e2, AlignMethod::Cca, t1, t2);
}

Matrix least_squares_transform(const Matrix& e1, const Matrix& e2) {
  if (e1.rows() != e2.rows()) throw DataError("least squares: row counts differ");
  const Svd s = thin_svd(e2);
  if (s.s.minCoeff() < kRankTolerance) {
    throw DataError("least squares: second embedding is rank deficient");
  }
  return s.v * s.s.cwiseInverse().asDiagonal() * (s.u.transpose() * e1);
}

AlignedPair least_squares_align(const EmbeddingSet& e1, const EmbeddingSet& e2) {
  require_same_shape(e1, e2);
  const Matrix w = least_squares_transform(e1.vectors, e2.vectors);
  const auto d = static_cast<Eigen::Index>(e1.dim());
  return make_pair(e1, e2, AlignMethod::LeastSquares, Matrix::Identity(d, d), w);
}

AlignedPair align(const EmbeddingSet& e1, const EmbeddingSet& e2, AlignMethod method) {
  switch (method) {
    case AlignMethod::Procrustes: return procrustes_align(e1, e2);
    case AlignMethod::Cca: return cca_align(e1, e2);
    case AlignMethod::LeastSquares: return least_squares_align(e1, e2);
  }
  throw ConfigError("unknown alignment method");
}

EmbeddingSet prepare_for_alignment(const EmbeddingSet& raw, const std::vector<double>& log_freqs,
                                   const PrepareOptions& options) {
  if (!options.frequency_adjust) return normalize(raw);
  if (options.adjust_before_normalize) return normalize(frequency_adjust(raw, log_freqs));
  return normalize(frequency_adjust(normalize(raw), log_freqs));
}

std::size_t translate(const AlignedPair& pair, std::size_t word, Direction direction) {
  if (word >= pair.size()) throw DataError("word index out of range");
  Matrix s1, s2;
  const Matrix& a = unit_rows(pair.first, s1);
  const Matrix& b = unit_rows(pair.second, s2);
  const Matrix& source = direction == Direction::FirstToSecond ? a : b;
  const Matrix& target = direction == Direction::FirstToSecond ? b : a;
  std::vector<std::size_t> best(pair.size());
  const auto row = static_cast<Eigen::Index>(word);
  translate_block(source, target, row, row + 1, best);
  return best[word];
}

std::vector<std::size_t> translate_all(const AlignedPair& pair, Direction direction,
                                       int threads) {
  Matrix s1, s2;
  const Matrix& a = unit_rows(pair.first, s1);
  const Matrix& b = unit_rows(pair.second, s2);
  const Matrix& source = direction == Direction::FirstToSecond ? a : b;
  const Matrix& target = direction == Direction::FirstToSecond ? b : a;
  const Eigen::Index n = source.rows();
  std::vector<std::size_t> best(static_cast<std::size_t>(n));
  const Eigen::Index blocks = (n + kTranslateBlock - 1) / kTranslateBlock;
  auto run = [&](Eigen::Index first_block, Eigen::Index stride) {
    for (Eigen::Index blk = first_block; blk < blocks; blk += stride) {
      const Eigen::Index begin = blk * kTranslateBlock;
      translate_block(source, target, begin, std::min(n, begin + kTranslateBlock), best);
    }
  };
  const auto workers = static_cast<Eigen::Index>(std::max(1, threads));
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (Eigen::Index t = 0; t < workers; ++t) pool.emplace_back(run, t, workers);
    for (auto& t : pool) t.join();
  }
  return best;
}

std::vector<std::size_t> mistranslation_set(const std::vector<std::size_t>& forward,
                                            const std::vector<std::size_t>& backward) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < forward.size(); ++i)
    if (forward[i] != i || backward[i] != i) out.push_back(i);
  return out;
}

std::vector<std::size_t> mistranslation_set(const AlignedPair& pair, int threads) {
  return mistranslation_set(translate_all(pair, Direction::FirstToSecond, threads),
                            translate_all(pair, Direction::SecondToFirst, threads));
}

void write_aligned_pair(const AlignedPair& pair, const std::filesystem::path& prefix,
                        bool compress) {
  const std::string base = prefix.string();
  write_embeddings(pair.first, base + ".first.txt", compress);
  write_embeddings(pair.second, base + ".second.txt", compress);
  const auto checksum = [](const Matrix& m) {
    return hex64(fnv1a(std::string_view(reinterpret_cast<const char*>(m.data()),
                                        static_cast<std::size_t>(m.size()) * sizeof(double))));
  };
  nlohmann::ordered_json meta;
  meta["method"] = to_string(pair.method);
  meta["residual"] = pair.residual;
  meta["D"] = pair.dim();
  meta["N_w"] = pair.size();
  meta["transform1_checksum"] = checksum(pair.transform1);
  meta["transform2_checksum"] = checksum(pair.transform2);
  write_file(base + ".json", meta.dump(2) + "\n");
}

AlignedPair read_aligned_pair(const std::filesystem::path& prefix) {
  const std::string base = prefix.string();
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(base + ".json"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(base + ".json: " + e.what());
  }
  AlignedPair pair;
  pair.first = read_embeddings(base + ".first.txt");
  pair.second = read_embeddings(base + ".second.txt");
  if (pair.first.tokens != pair.second.tokens || pair.first.dim() != pair.second.dim()) {
    throw DataError(base + ": aligned embeddings disagree in vocabulary or dimension");
  }
  try {
    pair.method = parse_align_method(meta.at("method").get<std::string>());
    pair.residual = meta.at("residual").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(base + ".json: " + e.what());
  }
  // Text round-off leaves rows a few ulps from unit length.
  pair.first = normalize(pair.first);
  pair.second = normalize(pair.second);
  return pair;
}

}  // namespace dialectoscope
