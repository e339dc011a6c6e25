#include "dialectoscope/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "dialectoscope/error.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

constexpr Eigen::Index kKnnBlock = 256;
const char* const kMeasureHeader =
    "token,freq1,freq2,cosine_distance,knn_overlap,offset_pca,svm_distance,sense_separation,"
    "mistranslates";

// Top-k of `sims` (one row) excluding `self`, ordered by similarity then index.
std::vector<std::size_t> top_k(const double* sims, std::size_t n, std::size_t self, std::size_t k,
                               std::vector<std::size_t>& scratch) {
  scratch.clear();
  for (std::size_t j = 0; j < n; ++j)
    if (j != self) scratch.push_back(j);
  const auto better = [sims](std::size_t a, std::size_t b) {
    return sims[a] != sims[b] ? sims[a] > sims[b] : a < b;
  };
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(k);
  std::nth_element(scratch.begin(), mid, scratch.end(), better);
  std::sort(scratch.begin(), mid, better);
  return {scratch.begin(), mid};
}

void check_k(std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) {
    throw ConfigError("knn k must satisfy 1 <= k < N_w (k = " + std::to_string(k) +
                      ", N_w = " + std::to_string(n) + ")");
  }
}

double overlap_distance(std::vector<std::size_t> a, std::vector<std::size_t> b, std::size_t k) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return 1.0 - static_cast<double>(common.size()) / static_cast<double>(k);
}

Vector unit_offset(const AlignedPair& pair, std::size_t i, double& norm) {
  const auto r = static_cast<Eigen::Index>(i);
  Vector o = (pair.first.vectors.row(r) - pair.second.vectors.row(r)).transpose();
  norm = o.norm();
  if (norm < 1e-12) return o;
  return o / norm;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_real(*v, 17) : std::string();
}

}  // namespace

double cosine_distance(const AlignedPair& pair, std::size_t i) {
  const auto r = static_cast<Eigen::Index>(i);
  const auto a = pair.first.vectors.row(r);
  const auto b = pair.second.vectors.row(r);
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) throw DataError("cosine distance of a zero vector");
  return 1.0 - a.dot(b) / denom;
}

std::vector<std::size_t> nearest_neighbors(const Matrix& e, std::size_t i, std::size_t k) {
  const auto n = static_cast<std::size_t>(e.rows());
  check_k(n, k);
  const Matrix unit = normalize_rows(e);
  const Eigen::VectorXd sims = unit * unit.row(static_cast<Eigen::Index>(i)).transpose();
  std::vector<std::size_t> scratch;
  return top_k(sims.data(), n, i, k, scratch);
}

double knn_overlap_distance(const EmbeddingSet& e1, const EmbeddingSet& e2, std::size_t i,
                            std::size_t k) {
  if (e1.size() != e2.size()) throw DataError("embeddings differ in vocabulary size");
  return overlap_distance(nearest_neighbors(e1.vectors, i, k), nearest_neighbors(e2.vectors, i, k),
                          k);
}

std::vector<double> knn_overlap_all(const EmbeddingSet& e1, const EmbeddingSet& e2,
                                    std::size_t k, int threads) {
  if (e1.size() != e2.size()) throw DataError("embeddings differ in vocabulary size");
  const auto n = e1.size();
  check_k(n, k);
  const Matrix u1 = normalize_rows(e1.vectors);
  const Matrix u2 = normalize_rows(e2.vectors);
  std::vector<double> out(n);
  const auto rows = static_cast<Eigen::Index>(n);
  const Eigen::Index blocks = (rows + kKnnBlock - 1) / kKnnBlock;
  auto run = [&](Eigen::Index first, Eigen::Index stride) {
    std::vector<std::size_t> scratch;
    // Column-major so each source row's similarities are contiguous.
    Eigen::MatrixXd s1, s2;
    for (Eigen::Index blk = first; blk < blocks; blk += stride) {
      const Eigen::Index begin = blk * kKnnBlock;
      const Eigen::Index len = std::min(rows, begin + kKnnBlock) - begin;
      s1.noalias() = u1 * u1.middleRows(begin, len).transpose();
      s2.noalias() = u2 * u2.middleRows(begin, len).transpose();
      for (Eigen::Index r = 0; r < len; ++r) {
        const auto i = static_cast<std::size_t>(begin + r);
        out[i] = overlap_distance(top_k(s1.col(r).data(), n, i, k, scratch),
                                  top_k(s2.col(r).data(), n, i, k, scratch), k);
      }
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
  return out;
}

std::vector<double> offset_pca_scores(const AlignedPair& pair, bool center) {
  Eigen::MatrixXd offsets = pair.first.vectors - pair.second.vectors;
  if (center) offsets.rowwise() -= offsets.colwise().mean();
  const Svd svd = thin_svd(offsets);
  const Eigen::VectorXd scores = (offsets * svd.v.col(0)).cwiseAbs();
  return {scores.data(), scores.data() + scores.size()};
}

LinearSvm train_pair_svm(const AlignedPair& pair, const SvmConfig& config) {
  const Eigen::Index n = pair.first.vectors.rows();
  Matrix rows(2 * n, pair.first.vectors.cols());
  rows.topRows(n) = pair.first.vectors;
  rows.bottomRows(n) = pair.second.vectors;
  std::vector<int> labels(static_cast<std::size_t>(2 * n), 1);
  std::fill(labels.begin() + n, labels.end(), -1);
  return train_linear_svm(rows, labels, config);
}

double svm_distance(const LinearSvm& model, const AlignedPair& pair, std::size_t i) {
  const auto r = static_cast<Eigen::Index>(i);
  return model.distance(pair.first.vectors.row(r).transpose()) +
         model.distance(pair.second.vectors.row(r).transpose());
}

double excess_cooccurrence(const CoocMatrix& cooc, std::size_t i, std::size_t j) {
  const double c = cooc.entry(i, j);
  if (c == 0.0) return 0.0;
  return c * cooc.total() / (cooc.row_sum(i) * cooc.row_sum(j));
}

ECProfile ec_profile(const CoocMatrix& cooc1, const CoocMatrix& cooc2, std::size_t focal) {
  if (cooc1.size() != cooc2.size()) throw DataError("co-occurrence matrices differ in size");
  ECProfile p;
  p.focal = focal;
  for (auto j : cooc1.row_cols(focal)) {
    if (j == focal) continue;
    if (excess_cooccurrence(cooc1, focal, j) > 1.0 && excess_cooccurrence(cooc2, focal, j) <= 1.0)
      p.only1.push_back(j);
  }
  for (auto j : cooc2.row_cols(focal)) {
    if (j == focal) continue;
    if (excess_cooccurrence(cooc2, focal, j) > 1.0 && excess_cooccurrence(cooc1, focal, j) <= 1.0)
      p.only2.push_back(j);
  }
  return p;
}

std::optional<double> sense_separation(const AlignedPair& pair, const CoocMatrix& cooc1,
                                       const CoocMatrix& cooc2, std::size_t i) {
  if (cooc1.size() != pair.size()) throw DataError("co-occurrence and embedding sizes differ");
  const ECProfile profile = ec_profile(cooc1, cooc2, i);
  if (profile.only1.empty() || profile.only2.empty()) return std::nullopt;
  double norm = 0.0;
  const Vector u = unit_offset(pair, i, norm);
  if (norm < 1e-12) return std::nullopt;
  const auto mean_diagonal = [&](const std::vector<std::size_t>& set) {
    double sum = 0.0;
    for (auto j : set) {
      const auto r = static_cast<Eigen::Index>(j);
      sum += 0.5 * (pair.first.vectors.row(r).dot(u) + pair.second.vectors.row(r).dot(u));
    }
    return sum / static_cast<double>(set.size());
  };
  return mean_diagonal(profile.only1) - mean_diagonal(profile.only2);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + end - 1) + 1.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("spearman: inputs differ in length");
  if (x.size() < 2) throw DataError("spearman: need at least two values");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DataError("spearman: non-finite input");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("spearman: undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double MeasureRow::log_mean_frequency() const {
  return std::log(0.5 * (static_cast<double>(freq1) + static_cast<double>(freq2)));
}

MeasureTable compute_measures(const AlignedPair& pair, const EmbeddingSet& unaligned1,
                              const EmbeddingSet& unaligned2, const Vocabulary& vocab,
                              const CoocMatrix& cooc1, const CoocMatrix& cooc2,
                              const MeasureOptions& options) {
  const std::size_t n = pair.size();
  if (vocab.size() != n || unaligned1.size() != n || unaligned2.size() != n ||
      cooc1.size() != n || cooc2.size() != n) {
    throw DataError("measure inputs are bound to vocabularies of different sizes");
  }
  MeasureTable table;
  table.knn_k = options.knn_k;
  const auto knn = knn_overlap_all(unaligned1, unaligned2, options.knn_k, options.threads);
  const auto pca = offset_pca_scores(pair, options.center_offsets);
  const LinearSvm svm = train_pair_svm(pair, options.svm);
  table.svm_converged = svm.converged;
  const auto wrong = mistranslation_set(pair, options.threads);
  std::vector<bool> mistranslates(n, false);
  for (auto i : wrong) mistranslates[i] = true;

  table.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    MeasureRow& row = table.rows[i];
    row.token = vocab.token(i);
    row.freq1 = vocab.count1(i);
    row.freq2 = vocab.count2(i);
    row.cosine_distance = cosine_distance(pair, i);
    row.knn_overlap = knn[i];
    row.offset_pca = pca[i];
    row.svm_distance = svm_distance(svm, pair, i);
    row.sense_separation = sense_separation(pair, cooc1, cooc2, i);
    row.mistranslates = mistranslates[i];
  }
  return table;
}

std::vector<std::size_t> rank_by_sense_separation(const MeasureTable& table, bool absolute) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (table.rows[i].sense_separation) out.push_back(i);
  const auto key = [&](std::size_t i) {
    const double s = *table.rows[i].sense_separation;
    return absolute ? std::abs(s) : s;
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  return out;
}

std::string serialize_measure_table(const MeasureTable& table) {
  std::string out = "#knn_k=" + std::to_string(table.knn_k) + "\n";
  out += std::string("#svm_converged=") + (table.svm_converged ? "true" : "false") + "\n";
  out += kMeasureHeader;
  out += '\n';
  for (const auto& r : table.rows) {
    out += csv_field(r.token);
    out += ',' + std::to_string(r.freq1);
    out += ',' + std::to_string(r.freq2);
    out += ',' + format_real(r.cosine_distance);
    out += ',' + format_real(r.knn_overlap);
    out += ',' + format_real(r.offset_pca);
    out += ',' + format_real(r.svm_distance);
    out += ',' + format_optional(r.sense_separation);
    out += r.mistranslates ? ",1\n" : ",0\n";
  }
  return out;
}

void write_measure_table(const MeasureTable& table, const std::filesystem::path& path,
                         bool compress) {
  write_file(path, serialize_measure_table(table), compress);
}

MeasureTable read_measure_table(const std::filesystem::path& path) {
  LineReader reader(path);
  MeasureTable table;
  std::string line;
  bool header = false;
  const auto fail = [&](const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(reader.line_number()) + ": " + what);
  };
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (!header && line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected #key=value");
      const std::string key = line.substr(1, eq - 1);
      const std::string value = line.substr(eq + 1);
      if (key == "knn_k") table.knn_k = static_cast<std::size_t>(parse_integer(value));
      else if (key == "svm_converged") table.svm_converged = value == "true";
      continue;
    }
    if (!header) {
      if (line != kMeasureHeader) fail("unexpected measure table header");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 9) fail("expected 9 fields");
    MeasureRow r;
    r.token = f[0];
    r.freq1 = static_cast<std::uint64_t>(parse_integer(f[1]));
    r.freq2 = static_cast<std::uint64_t>(parse_integer(f[2]));
    r.cosine_distance = parse_real(f[3]);
    r.knn_overlap = parse_real(f[4]);
    r.offset_pca = parse_real(f[5]);
    r.svm_distance = parse_real(f[6]);
    if (!f[7].empty()) r.sense_separation = parse_real(f[7]);
    if (f[8] != "0" && f[8] != "1") fail("mistranslates must be 0 or 1");
    r.mistranslates = f[8] == "1";
    table.rows.push_back(std::move(r));
  }
  if (!header) throw DataError(path.string() + ": missing measure table header");
  return table;
}

}  // namespace dialectoscope
