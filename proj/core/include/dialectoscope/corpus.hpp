#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dialectoscope {

using Document = std::vector<std::string>;

/// A tokenized corpus: one token sequence per document (comment, sentence).
struct Corpus {
  std::vector<Document> documents;
  int label = 1;

  std::size_t doc_count() const { return documents.size(); }
  std::size_t token_count() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// One document per line, tokens separated by single spaces. Blank lines are
/// kept as empty documents so document order survives a reload.
Corpus read_corpus(const std::filesystem::path& path, int label = 1);
std::string serialize_corpus(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  bool compress = false);

/// Drops exact duplicate documents, keeping the first occurrence.
Corpus dedup_documents(const Corpus& corpus);

/// Token counts over a corpus (all tokens, not restricted to a vocabulary).
std::unordered_map<std::string, std::uint64_t> count_tokens(const Corpus& corpus);

/// Shared word <-> index bijection with per-corpus counts. Words are ordered
/// by descending mean count, ties broken lexicographically, so index 0 is the
/// most frequent word.
class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t count1 = 0;
    std::uint64_t count2 = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Vocabulary() = default;
  /// Sorts the entries into canonical order. Tokens must be unique.
  explicit Vocabulary(std::vector<Entry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string& token(std::size_t i) const { return entries_[i].token; }
  std::uint64_t count1(std::size_t i) const { return entries_[i].count1; }
  std::uint64_t count2(std::size_t i) const { return entries_[i].count2; }
  double mean_count(std::size_t i) const {
    return 0.5 * (static_cast<double>(entries_[i].count1) +
                  static_cast<double>(entries_[i].count2));
  }
  double log_mean_frequency(std::size_t i) const;
  std::optional<std::size_t> index_of(std::string_view token) const;
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::string> tokens() const;

  /// log(count_k) per word, the frequency vector used for frequency adjustment.
  std::vector<double> log_counts(int corpus) const;

  /// Up to `limit` tokens adjacent to `token` in lexicographic order; used to
  /// suggest spellings for out-of-vocabulary requests.
  std::vector<std::string> nearest_lexicographic(std::string_view token,
                                                 std::size_t limit = 5) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Tokens with at least `min_count` occurrences in both corpora.
/// Throws DataError when no token qualifies.
Vocabulary build_vocabulary(const Corpus& c1, const Corpus& c2, std::uint64_t min_count);

/// `token<TAB>count1<TAB>count2` per line.
std::string serialize_vocabulary(const Vocabulary& vocab);
void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path,
                      bool compress = false);
Vocabulary read_vocabulary(const std::filesystem::path& path);

struct CoocEntry {
  std::uint32_t row;
  std::uint32_t col;
  double weight;
  friend bool operator==(const CoocEntry&, const CoocEntry&) = default;
};

/// Sparse symmetric co-occurrence weights X_ij for one corpus.
///
/// Storage is the full symmetric matrix in CSR form with sorted columns, so a
/// row can be scanned directly. `total()` is the sum over all (i, j) cells,
/// i.e. both triangles, and equals the sum of the row sums.
class CoocMatrix {
 public:
  CoocMatrix() = default;

  /// Builds from upper-triangle entries (row <= col). Duplicate cells are
  /// summed; non-positive weights are rejected.
  static CoocMatrix from_upper(std::size_t n, std::vector<CoocEntry> upper);

  std::size_t size() const { return n_; }
  /// Stored (i, j) cells counting both triangles.
  std::size_t nnz() const { return cols_.size(); }
  std::size_t nnz_upper() const;

  double entry(std::size_t i, std::size_t j) const;
  std::span<const std::uint32_t> row_cols(std::size_t i) const {
    return {cols_.data() + row_ptr_[i], cols_.data() + row_ptr_[i + 1]};
  }
  std::span<const double> row_weights(std::size_t i) const {
    return {vals_.data() + row_ptr_[i], vals_.data() + row_ptr_[i + 1]};
  }
  double row_sum(std::size_t i) const { return row_sums_[i]; }
  const std::vector<double>& row_sums() const { return row_sums_; }
  double total() const { return total_; }

  std::vector<CoocEntry> upper_entries() const;

  friend bool operator==(const CoocMatrix& a, const CoocMatrix& b) {
    return a.n_ == b.n_ && a.row_ptr_ == b.row_ptr_ && a.cols_ == b.cols_ &&
           a.vals_ == b.vals_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  std::vector<double> row_sums_;
  double total_ = 0.0;
};

struct CoocOptions {
  int window = 10;
  bool distance_weighting = true;  // 1/d when on, 1 otherwise
  int threads = 1;
};

/// Symmetric, document-bounded window counting. Out-of-vocabulary tokens keep
/// their positions (they count toward distances) but produce no entries.
/// Weights are accumulated exactly in fixed point (units of 1/lcm(1..window)),
/// so the result is independent of document order and thread count.
CoocMatrix count_cooccurrences(const Corpus& corpus, const Vocabulary& vocab,
                               const CoocOptions& options = {});

/// Fraction of the vocabulary each word co-occurs with (self excluded).
std::vector<double> cooc_share(const CoocMatrix& cooc);

std::string serialize_cooc(const CoocMatrix& cooc);
void write_cooc(const CoocMatrix& cooc, const std::filesystem::path& path,
                bool compress = false);
CoocMatrix read_cooc(const std::filesystem::path& path);

}  // namespace dialectoscope
