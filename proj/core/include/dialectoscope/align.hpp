#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "dialectoscope/embedding.hpp"
#include "dialectoscope/linalg.hpp"

namespace dialectoscope {

enum class AlignMethod { Procrustes, Cca, LeastSquares };

AlignMethod parse_align_method(const std::string& name);
std::string to_string(AlignMethod m);

/// Two embeddings of one vocabulary mapped into a shared space.
///
/// `first = normalize(E1 * transform1)` and `second = normalize(E2 * transform2)`,
/// where E1, E2 are the inputs handed to the aligner.
struct AlignedPair {
  EmbeddingSet first;
  EmbeddingSet second;
  AlignMethod method = AlignMethod::Procrustes;
  Matrix transform1;
  Matrix transform2;
  double residual = 0.0;  // ||first - second||_F

  std::size_t size() const { return first.size(); }
  std::size_t dim() const { return first.dim(); }
};

struct FrequencyAdjustment {
  Vector direction;  // unit length
  double removed_norm = 0.0;
};

/// Direction E^T f, normalized. Throws DataError when ||E^T f|| < 1e-12.
FrequencyAdjustment frequency_direction(const Matrix& e, const std::vector<double>& log_freqs);

/// E (I - u u^T) for the stored direction u.
EmbeddingSet apply_frequency_adjustment(const EmbeddingSet& e, const FrequencyAdjustment& adj);

/// Removes the log-frequency direction from `e`. `adjustment`, when given,
/// receives the removed direction.
EmbeddingSet frequency_adjust(const EmbeddingSet& e, const std::vector<double>& log_freqs,
                              FrequencyAdjustment* adjustment = nullptr);

/// Orthogonal W minimizing ||E1 - E2 W||_F: with E2^T E1 = U S V^T, W = U V^T.
Matrix procrustes_rotation(const Matrix& e1, const Matrix& e2);

/// Twofold Procrustes: E1 -> E1 V and E2 -> E2 U, then rows re-normalized.
AlignedPair procrustes_align(const EmbeddingSet& e1, const EmbeddingSet& e2);

/// CCA through SVDs of both spaces; output dimensions sorted by canonical
/// correlation. Throws DataError if either space is rank deficient.
AlignedPair cca_align(const EmbeddingSet& e1, const EmbeddingSet& e2);

/// Unconstrained W minimizing ||E1 - E2 W||_F (pseudoinverse solution).
/// Throws DataError if E2 is rank deficient.
Matrix least_squares_transform(const Matrix& e1, const Matrix& e2);
AlignedPair least_squares_align(const EmbeddingSet& e1, const EmbeddingSet& e2);

AlignedPair align(const EmbeddingSet& e1, const EmbeddingSet& e2, AlignMethod method);

struct PrepareOptions {
  bool frequency_adjust = true;
  // Adjust the raw vectors and normalize afterwards; off means normalize,
  // adjust, normalize again.
  bool adjust_before_normalize = true;
};

/// The pre-alignment half of the pipeline: optional frequency adjustment
/// and row normalization.
EmbeddingSet prepare_for_alignment(const EmbeddingSet& raw, const std::vector<double>& log_freqs,
                                   const PrepareOptions& options);

enum class Direction { FirstToSecond, SecondToFirst };

/// Index of the target-space row most cosine-similar to the source row;
/// ties go to the lowest index.
std::size_t translate(const AlignedPair& pair, std::size_t word, Direction direction);

/// translate() for every word.
std::vector<std::size_t> translate_all(const AlignedPair& pair, Direction direction,
                                       int threads = 1);

/// Words that fail to translate to themselves in at least one direction,
/// ascending.
std::vector<std::size_t> mistranslation_set(const AlignedPair& pair, int threads = 1);
std::vector<std::size_t> mistranslation_set(const std::vector<std::size_t>& forward,
                                            const std::vector<std::size_t>& backward);

/// Writes `<prefix>.first.txt`, `<prefix>.second.txt` and `<prefix>.json`.
void write_aligned_pair(const AlignedPair& pair, const std::filesystem::path& prefix,
                        bool compress = false);
/// Transforms are not persisted; the loaded pair carries empty transforms.
AlignedPair read_aligned_pair(const std::filesystem::path& prefix);

}  // namespace dialectoscope
