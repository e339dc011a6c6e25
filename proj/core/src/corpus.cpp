#include "dialectoscope/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dialectoscope/error.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

std::string join(const Document& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (i) out += ' ';
    out += doc[i];
  }
  return out;
}

}  // namespace

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

Corpus read_corpus(const std::filesystem::path& path, int label) {
  Corpus corpus;
  corpus.label = label;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    Document doc;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      if (end > pos) doc.emplace_back(line, pos, end - pos);
      pos = end;
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    out += join(doc);
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path, bool compress) {
  write_file(path, serialize_corpus(corpus), compress);
}

Corpus dedup_documents(const Corpus& corpus) {
  Corpus out;
  out.label = corpus.label;
  std::unordered_set<std::string> seen;
  seen.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    // '\n' cannot occur inside a token, so the joined form is injective.
    if (seen.insert(join(doc)).second) out.documents.push_back(doc);
  }
  return out;
}

std::unordered_map<std::string, std::uint64_t> count_tokens(const Corpus& corpus) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus.documents)
    for (const auto& tok : doc) ++counts[tok];
  return counts;
}

Vocabulary::Vocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    const auto sa = a.count1 + a.count2;
    const auto sb = b.count1 + b.count2;
    if (sa != sb) return sa > sb;
    return a.token < b.token;
  });
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].token, i).second) {
      throw DataError("duplicate vocabulary token '" + entries_[i].token + "'");
    }
  }
}

double Vocabulary::log_mean_frequency(std::size_t i) const {
  return std::log(mean_count(i));
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Vocabulary::tokens() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.token);
  return out;
}

std::vector<double> Vocabulary::log_counts(int corpus) const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    const auto c = corpus == 1 ? e.count1 : e.count2;
    out.push_back(std::log(static_cast<double>(std::max<std::uint64_t>(c, 1))));
  }
  return out;
}

std::vector<std::string> Vocabulary::nearest_lexicographic(std::string_view token,
                                                           std::size_t limit) const {
  auto sorted = tokens();
  std::sort(sorted.begin(), sorted.end());
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), token);
  const auto pos = static_cast<std::size_t>(it - sorted.begin());
  const std::size_t half = limit / 2;
  std::size_t lo = pos > half ? pos - half : 0;
  const std::size_t hi = std::min(sorted.size(), lo + limit);
  lo = hi > limit ? hi - limit : 0;
  return {sorted.begin() + static_cast<std::ptrdiff_t>(lo),
          sorted.begin() + static_cast<std::ptrdiff_t>(hi)};
}

Vocabulary build_vocabulary(const Corpus& c1, const Corpus& c2, std::uint64_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  const auto counts1 = count_tokens(c1);
  const auto counts2 = count_tokens(c2);
  std::vector<Vocabulary::Entry> entries;
  for (const auto& [tok, n1] : counts1) {
    if (n1 < min_count) continue;
    auto it = counts2.find(tok);
    if (it == counts2.end() || it->second < min_count) continue;
    entries.push_back({tok, n1, it->second});
  }
  if (entries.empty()) {
    throw DataError("empty vocabulary: no token occurs at least " +
                    std::to_string(min_count) + " times in both corpora");
  }
  return Vocabulary(std::move(entries));
}

std::string serialize_vocabulary(const Vocabulary& vocab) {
  std::string out;
  for (const auto& e : vocab.entries()) {
    out += e.token;
    out += '\t';
    out += std::to_string(e.count1);
    out += '\t';
    out += std::to_string(e.count2);
    out += '\n';
  }
  return out;
}

void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path,
                      bool compress) {
  write_file(path, serialize_vocabulary(vocab), compress);
}

Vocabulary read_vocabulary(const std::filesystem::path& path) {
  LineReader reader(path);
  std::vector<Vocabulary::Entry> entries;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(reader.line_number()) +
                      ": expected token<TAB>count1<TAB>count2");
    }
    entries.push_back({std::string(fields[0]),
                       static_cast<std::uint64_t>(parse_integer(fields[1])),
                       static_cast<std::uint64_t>(parse_integer(fields[2]))});
  }
  if (entries.empty()) throw DataError("empty vocabulary file " + path.string());
  return Vocabulary(std::move(entries));
}

}  // namespace dialectoscope
