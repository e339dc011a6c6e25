#include "dialectoscope/embedding.hpp"

#include "dialectoscope/error.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

EmbeddingSet normalize(const EmbeddingSet& e) {
  return {e.tokens, normalize_rows(e.vectors), true};
}

EmbeddingSet restrict_to(const EmbeddingSet& e, const Vocabulary& vocab) {
  std::unordered_map<std::string, std::size_t> rows;
  rows.reserve(e.tokens.size());
  for (std::size_t i = 0; i < e.tokens.size(); ++i) rows.emplace(e.tokens[i], i);
  EmbeddingSet out;
  out.normalized = e.normalized;
  out.tokens = vocab.tokens();
  out.vectors.resize(static_cast<Eigen::Index>(vocab.size()), e.vectors.cols());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    auto it = rows.find(vocab.token(i));
    if (it == rows.end()) {
      throw DataError("embedding has no vector for vocabulary token '" + vocab.token(i) + "'");
    }
    out.vectors.row(static_cast<Eigen::Index>(i)) =
        e.vectors.row(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

std::string serialize_embeddings(const EmbeddingSet& e, int significant_digits) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    out += e.tokens[i];
    for (Eigen::Index k = 0; k < e.vectors.cols(); ++k) {
      out += ' ';
      out += format_real(e.vectors(static_cast<Eigen::Index>(i), k), significant_digits);
    }
    out += '\n';
  }
  return out;
}

void write_embeddings(const EmbeddingSet& e, const std::filesystem::path& path,
                      bool compress) {
  write_file(path, serialize_embeddings(e), compress);
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  LineReader reader(path);
  std::vector<std::string> tokens;
  std::vector<double> values;
  std::size_t dim = 0;
  std::string line;
  while (reader.next(line)) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ' ');
    if (reader.line_number() == 1 && fields.size() == 2) {
      // word2vec header: "<count> <dim>"
      try {
        parse_integer(fields[0]);
        parse_integer(fields[1]);
        continue;
      } catch (const DataError&) {
      }
    }
    if (fields.size() < 2) {
      throw DataError(path.string() + ":" + std::to_string(reader.line_number()) +
                      ": expected 'token v1 ... vD'");
    }
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      throw DataError(path.string() + ":" + std::to_string(reader.line_number()) +
                      ": expected " + std::to_string(dim) + " values");
    }
    tokens.emplace_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(parse_real(fields[k]));
  }
  if (tokens.empty()) throw DataError("no vectors in " + path.string());
  EmbeddingSet e;
  e.tokens = std::move(tokens);
  e.vectors = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(e.tokens.size()),
                                 static_cast<Eigen::Index>(dim));
  bool unit = true;
  for (Eigen::Index i = 0; i < e.vectors.rows() && unit; ++i)
    unit = std::abs(e.vectors.row(i).norm() - 1.0) < 1e-6;
  e.normalized = unit;
  return e;
}

}  // namespace dialectoscope
