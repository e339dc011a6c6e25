#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dialectoscope/corpus.hpp"
#include "dialectoscope/linalg.hpp"

namespace dialectoscope {

/// N x D embedding matrix; row i belongs to tokens[i].
struct EmbeddingSet {
  std::vector<std::string> tokens;
  Matrix vectors;
  bool normalized = false;

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
};

EmbeddingSet normalize(const EmbeddingSet& e);

/// Rows reordered to the vocabulary's index order. Throws DataError if a
/// vocabulary token has no vector; extra vectors are dropped.
EmbeddingSet restrict_to(const EmbeddingSet& e, const Vocabulary& vocab);

/// Common word-vector text format: `token v1 ... vD` per line, no header.
/// A leading `count dim` header line (word2vec style) is skipped on read.
std::string serialize_embeddings(const EmbeddingSet& e, int significant_digits = 9);
void write_embeddings(const EmbeddingSet& e, const std::filesystem::path& path,
                      bool compress = false);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

}  // namespace dialectoscope
