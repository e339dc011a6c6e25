#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "dialectoscope/corpus.hpp"
#include "dialectoscope/error.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

constexpr std::uint32_t kNoWord = 0xffffffffu;

using Cell = std::pair<std::uint64_t, std::uint64_t>;  // (row << 32 | col, units)

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw NumericError("co-occurrence accumulator overflow; use a smaller window");
  }
  return out;
}

// Sorts and merges equal keys in place.
void reduce_cells(std::vector<Cell>& cells) {
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (out > 0 && cells[out - 1].first == cells[i].first) {
      cells[out - 1].second = checked_add(cells[out - 1].second, cells[i].second);
    } else {
      cells[out++] = cells[i];
    }
  }
  cells.resize(out);
}

std::vector<Cell> merge_reduced(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  std::vector<Cell> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, checked_add(a[i].second, b[j].second));
      ++i;
      ++j;
    }
  }
  return out;
}

class ShardCounter {
 public:
  ShardCounter(const std::vector<std::uint64_t>& units, int window)
      : units_(units), window_(window) {
    buffer_.reserve(kBufferSize);
  }

  void add_document(const std::vector<std::uint32_t>& ids) {
    const std::size_t len = ids.size();
    for (std::size_t p = 0; p < len; ++p) {
      const auto a = ids[p];
      if (a == kNoWord) continue;
      const std::size_t last = std::min(len - 1, p + static_cast<std::size_t>(window_));
      for (std::size_t q = p + 1; q <= last; ++q) {
        const auto b = ids[q];
        if (b == kNoWord) continue;
        const auto lo = std::min(a, b);
        const auto hi = std::max(a, b);
        // A same-word pair is one cell seen from both ends, hence twice.
        const std::uint64_t u = units_[q - p] * (lo == hi ? 2 : 1);
        buffer_.emplace_back((static_cast<std::uint64_t>(lo) << 32) | hi, u);
        if (buffer_.size() == kBufferSize) flush();
      }
    }
  }

  std::vector<Cell> finish() {
    flush();
    return std::move(reduced_);
  }

 private:
  static constexpr std::size_t kBufferSize = std::size_t{1} << 22;

  void flush() {
    if (buffer_.empty()) return;
    reduce_cells(buffer_);
    reduced_ = reduced_.empty() ? buffer_ : merge_reduced(reduced_, buffer_);
    buffer_.clear();
  }

  const std::vector<std::uint64_t>& units_;
  int window_;
  std::vector<Cell> buffer_;
  std::vector<Cell> reduced_;
};

std::uint64_t window_scale(int window, bool weighting) {
  if (!weighting) return 1;
  std::uint64_t l = 1;
  for (std::uint64_t d = 2; d <= static_cast<std::uint64_t>(window); ++d) {
    const auto g = std::gcd(l, d);
    std::uint64_t next;
    if (__builtin_mul_overflow(l / g, d, &next) || next > (std::uint64_t{1} << 52)) {
      throw ConfigError("window " + std::to_string(window) +
                        " is too large for exact harmonic weighting (max 36)");
    }
    l = next;
  }
  return l;
}

}  // namespace

CoocMatrix CoocMatrix::from_upper(std::size_t n, std::vector<CoocEntry> upper) {
  if (n >= kNoWord) throw DataError("vocabulary too large for co-occurrence indexing");
  for (const auto& e : upper) {
    if (e.row > e.col || e.col >= n) {
      throw DataError("co-occurrence entry (" + std::to_string(e.row) + "," +
                      std::to_string(e.col) + ") is not an upper-triangle cell of an " +
                      std::to_string(n) + "-word matrix");
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw DataError("co-occurrence weights must be positive and finite");
    }
  }
  std::sort(upper.begin(), upper.end(), [](const CoocEntry& a, const CoocEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (out > 0 && upper[out - 1].row == upper[i].row && upper[out - 1].col == upper[i].col) {
      upper[out - 1].weight += upper[i].weight;
    } else {
      upper[out++] = upper[i];
    }
  }
  upper.resize(out);

  CoocMatrix m;
  m.n_ = n;
  std::vector<std::size_t> counts(n, 0);
  for (const auto& e : upper) {
    ++counts[e.row];
    if (e.row != e.col) ++counts[e.col];
  }
  m.row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] = m.row_ptr_[i] + counts[i];
  m.cols_.resize(m.row_ptr_[n]);
  m.vals_.resize(m.row_ptr_[n]);
  std::vector<std::size_t> fill(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
  // Iterating upper cells in (row, col) order fills every row in ascending
  // column order: mirrored cells (col < row) arrive before the row's own.
  for (const auto& e : upper) {
    m.cols_[fill[e.row]] = e.col;
    m.vals_[fill[e.row]++] = e.weight;
    if (e.row != e.col) {
      m.cols_[fill[e.col]] = e.row;
      m.vals_[fill[e.col]++] = e.weight;
    }
  }
  m.row_sums_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = m.row_ptr_[i]; k < m.row_ptr_[i + 1]; ++k) s += m.vals_[k];
    m.row_sums_[i] = s;
  }
  m.total_ = 0.0;
  for (double s : m.row_sums_) m.total_ += s;
  return m;
}

std::size_t CoocMatrix::nnz_upper() const {
  std::size_t diag = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (entry(i, i) > 0.0) ++diag;
  return (nnz() - diag) / 2 + diag;
}

double CoocMatrix::entry(std::size_t i, std::size_t j) const {
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(j));
  if (it == cols.end() || *it != j) return 0.0;
  return vals_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<CoocEntry> CoocMatrix::upper_entries() const {
  std::vector<CoocEntry> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] >= i) out.push_back({static_cast<std::uint32_t>(i), cols_[k], vals_[k]});
    }
  }
  return out;
}

CoocMatrix count_cooccurrences(const Corpus& corpus, const Vocabulary& vocab,
                               const CoocOptions& options) {
  if (options.window < 1) throw ConfigError("window must be >= 1");
  const std::uint64_t scale = window_scale(options.window, options.distance_weighting);
  std::vector<std::uint64_t> units(static_cast<std::size_t>(options.window) + 1, 1);
  if (options.distance_weighting)
    for (std::size_t d = 1; d < units.size(); ++d) units[d] = scale / d;

  const std::size_t n_docs = corpus.documents.size();
  const std::size_t shards =
      std::max<std::size_t>(1, std::min<std::size_t>(options.threads, n_docs));
  std::vector<std::vector<Cell>> shard_cells(shards);

  auto run_shard = [&](std::size_t s) {
    const std::size_t begin = n_docs * s / shards;
    const std::size_t end = n_docs * (s + 1) / shards;
    ShardCounter counter(units, options.window);
    std::vector<std::uint32_t> ids;
    for (std::size_t d = begin; d < end; ++d) {
      const auto& doc = corpus.documents[d];
      ids.resize(doc.size());
      for (std::size_t p = 0; p < doc.size(); ++p) {
        const auto idx = vocab.index_of(doc[p]);
        ids[p] = idx ? static_cast<std::uint32_t>(*idx) : kNoWord;
      }
      counter.add_document(ids);
    }
    shard_cells[s] = counter.finish();
  };

  if (shards == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < shards; ++s) workers.emplace_back(run_shard, s);
    for (auto& w : workers) w.join();
  }

  // Canonical shard order; integer sums make the order immaterial anyway.
  std::vector<Cell> merged = std::move(shard_cells[0]);
  for (std::size_t s = 1; s < shards; ++s) merged = merge_reduced(merged, shard_cells[s]);

  std::vector<CoocEntry> upper;
  upper.reserve(merged.size());
  const double denom = static_cast<double>(scale);
  for (const auto& [key, u] : merged) {
    upper.push_back({static_cast<std::uint32_t>(key >> 32),
                     static_cast<std::uint32_t>(key & 0xffffffffu),
                     static_cast<double>(u) / denom});
  }
  return CoocMatrix::from_upper(vocab.size(), std::move(upper));
}

std::vector<double> cooc_share(const CoocMatrix& cooc) {
  std::vector<double> out(cooc.size(), 0.0);
  if (cooc.size() == 0) return out;
  const double n = static_cast<double>(cooc.size());
  for (std::size_t i = 0; i < cooc.size(); ++i) {
    std::size_t others = 0;
    for (auto c : cooc.row_cols(i))
      if (c != i) ++others;
    out[i] = static_cast<double>(others) / n;
  }
  return out;
}

std::string serialize_cooc(const CoocMatrix& cooc) {
  std::string out = "#dialectoscope-cooc v1 N_w=" + std::to_string(cooc.size()) + "\n";
  for (const auto& e : cooc.upper_entries()) {
    out += std::to_string(e.row);
    out += ' ';
    out += std::to_string(e.col);
    out += ' ';
    out += format_real(e.weight, 17);
    out += '\n';
  }
  return out;
}

void write_cooc(const CoocMatrix& cooc, const std::filesystem::path& path, bool compress) {
  write_file(path, serialize_cooc(cooc), compress);
}

CoocMatrix read_cooc(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  const std::string prefix = "#dialectoscope-cooc v1 N_w=";
  if (!reader.next(line) || line.rfind(prefix, 0) != 0) {
    throw DataError(path.string() + ": missing '#dialectoscope-cooc v1' header");
  }
  const auto n = static_cast<std::size_t>(parse_integer(std::string_view(line).substr(prefix.size())));
  std::vector<CoocEntry> upper;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto f = split(line, ' ');
    if (f.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(reader.line_number()) +
                      ": expected 'i j weight'");
    }
    upper.push_back({static_cast<std::uint32_t>(parse_integer(f[0])),
                     static_cast<std::uint32_t>(parse_integer(f[1])), parse_real(f[2])});
  }
  return CoocMatrix::from_upper(n, std::move(upper));
}

}  // namespace dialectoscope
