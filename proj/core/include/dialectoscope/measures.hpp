#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dialectoscope/align.hpp"
#include "dialectoscope/corpus.hpp"
#include "dialectoscope/svm.hpp"

namespace dialectoscope {

/// 1 - cos(E1a[i], E2a[i]).
double cosine_distance(const AlignedPair& pair, std::size_t i);

/// The k nearest rows to row i by cosine similarity, i itself excluded, ties
/// to the lowest index. Returned in descending similarity.
std::vector<std::size_t> nearest_neighbors(const Matrix& e, std::size_t i, std::size_t k);

/// 1 - |kNN_1(i) & kNN_2(i)| / k, computed within each (unaligned) space.
double knn_overlap_distance(const EmbeddingSet& e1, const EmbeddingSet& e2, std::size_t i,
                            std::size_t k);
std::vector<double> knn_overlap_all(const EmbeddingSet& e1, const EmbeddingSet& e2,
                                    std::size_t k, int threads = 1);

/// |first column of U S| for the SVD of the offset matrix E1a - E2a.
std::vector<double> offset_pca_scores(const AlignedPair& pair, bool center = false);

/// Separator between the 2N aligned rows (corpus 1 = +1, corpus 2 = -1).
LinearSvm train_pair_svm(const AlignedPair& pair, const SvmConfig& config);
/// Sum of the distances of the word's two aligned rows to the hyperplane.
double svm_distance(const LinearSvm& model, const AlignedPair& pair, std::size_t i);

/// C_ij * N_c / (rowsum_i * rowsum_j); 0 when C_ij = 0.
double excess_cooccurrence(const CoocMatrix& cooc, std::size_t i, std::size_t j);

/// Context words exceeding EC 1 with the focal word in exactly one corpus.
/// The focal word itself is never a member.
struct ECProfile {
  std::size_t focal = 0;
  std::vector<std::size_t> only1;  // HC^1: EC1 > 1, EC2 <= 1
  std::vector<std::size_t> only2;  // HC^2: EC2 > 1, EC1 <= 1
};
ECProfile ec_profile(const CoocMatrix& cooc1, const CoocMatrix& cooc2, std::size_t focal);

/// Mean diagonal projection of HC^1 minus that of HC^2 onto the unit offset
/// of word i. nullopt when either set is empty or the offset is zero.
std::optional<double> sense_separation(const AlignedPair& pair, const CoocMatrix& cooc1,
                                       const CoocMatrix& cooc2, std::size_t i);

/// Pearson correlation of average ranks. Throws DataError on mismatched
/// lengths, fewer than two values, or a constant input.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

/// Average (1-based) ranks, ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

struct MeasureRow {
  std::string token;
  std::uint64_t freq1 = 0;
  std::uint64_t freq2 = 0;
  double cosine_distance = 0.0;
  double knn_overlap = 0.0;
  double offset_pca = 0.0;
  double svm_distance = 0.0;
  std::optional<double> sense_separation;
  bool mistranslates = false;

  double log_mean_frequency() const;
  friend bool operator==(const MeasureRow&, const MeasureRow&) = default;
};

struct MeasureTable {
  std::vector<MeasureRow> rows;
  std::size_t knn_k = 30;
  bool svm_converged = true;

  friend bool operator==(const MeasureTable&, const MeasureTable&) = default;
};

struct MeasureOptions {
  std::size_t knn_k = 30;
  SvmConfig svm;
  bool center_offsets = false;
  int threads = 1;
};

/// All per-word measures. `unaligned1/2` are the normalized pre-alignment
/// embeddings used for the neighborhood measure.
MeasureTable compute_measures(const AlignedPair& pair, const EmbeddingSet& unaligned1,
                              const EmbeddingSet& unaligned2, const Vocabulary& vocab,
                              const CoocMatrix& cooc1, const CoocMatrix& cooc2,
                              const MeasureOptions& options = {});

/// Words with a defined sense separation, by descending S (or |S|).
std::vector<std::size_t> rank_by_sense_separation(const MeasureTable& table, bool absolute = false);

std::string serialize_measure_table(const MeasureTable& table);
void write_measure_table(const MeasureTable& table, const std::filesystem::path& path,
                         bool compress = false);
MeasureTable read_measure_table(const std::filesystem::path& path);

}  // namespace dialectoscope
