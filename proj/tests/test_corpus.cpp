#include <gtest/gtest.h>

#include <map>
#include <random>

#include "dialectoscope/corpus.hpp"
#include "dialectoscope/error.hpp"
#include "dialectoscope/textio.hpp"
#include "test_util.hpp"

using namespace dialectoscope;

namespace {

Corpus make_corpus(std::vector<Document> docs, int label = 1) {
  Corpus c;
  c.documents = std::move(docs);
  c.label = label;
  return c;
}

Vocabulary vocab_of(const std::vector<std::string>& words) {
  std::vector<Vocabulary::Entry> entries;
  // Descending counts keep the given order as the canonical index order.
  std::uint64_t count = 1000;
  for (const auto& w : words) entries.push_back({w, count, count}), --count;
  return Vocabulary(entries);
}

// Brute-force window counts over every ordered pair of positions.
Eigen::MatrixXd oracle_counts(const Corpus& corpus, const Vocabulary& vocab, int window,
                              bool weighted) {
  const auto n = static_cast<Eigen::Index>(vocab.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (const auto& doc : corpus.documents) {
    for (std::size_t p = 0; p < doc.size(); ++p) {
      for (std::size_t q = 0; q < doc.size(); ++q) {
        if (p == q) continue;
        const auto d = p > q ? p - q : q - p;
        if (d > static_cast<std::size_t>(window)) continue;
        const auto i = vocab.index_of(doc[p]);
        const auto j = vocab.index_of(doc[q]);
        if (!i || !j) continue;
        c(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j)) +=
            weighted ? 1.0 / static_cast<double>(d) : 1.0;
      }
    }
  }
  return c;
}

}  // namespace

TEST(Dedup, RemovesExactDuplicates) {
  const auto c = make_corpus({{"a", "b"}, {"a", "b"}, {"c"}});
  EXPECT_EQ(dedup_documents(c).documents, (std::vector<Document>{{"a", "b"}, {"c"}}));
}

TEST(Dedup, IdentityWithoutDuplicates) {
  const auto c = make_corpus({{"x"}, {"y", "z"}, {}});
  EXPECT_EQ(dedup_documents(c), c);
}

TEST(Dedup, KeepsNearDuplicates) {
  const auto c = make_corpus({{"a"}, {"a", "a"}});
  EXPECT_EQ(dedup_documents(c), c);
}

TEST(Dedup, KeepsLabel) {
  const auto c = make_corpus({{"a"}, {"a"}}, 2);
  EXPECT_EQ(dedup_documents(c).label, 2);
}

TEST(Vocabulary, IntersectionRule) {
  const auto c1 = make_corpus({{"a", "a", "a", "a", "a", "b"}});
  const auto c2 = make_corpus({{"a", "a", "a", "b", "b", "b", "b", "b", "b", "b", "b", "b"}});
  const auto v = build_vocabulary(c1, c2, 2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.token(0), "a");
  EXPECT_EQ(v.count1(0), 5u);
  EXPECT_EQ(v.count2(0), 3u);
}

TEST(Vocabulary, DisjointCorporaIsAnError) {
  const auto c1 = make_corpus({{"a"}});
  const auto c2 = make_corpus({{"b"}});
  EXPECT_THROW(build_vocabulary(c1, c2, 1), DataError);
}

TEST(Vocabulary, CanonicalOrderAndLookup) {
  const Vocabulary v({{"b", 4, 4}, {"a", 4, 4}, {"z", 10, 2}, {"q", 1, 1}});
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"z", "a", "b", "q"}));
  EXPECT_EQ(v.index_of("b"), 2u);
  EXPECT_FALSE(v.index_of("missing").has_value());
  EXPECT_DOUBLE_EQ(v.mean_count(0), 6.0);
}

TEST(Vocabulary, NearestLexicographicSuggestsNeighbors) {
  const Vocabulary v({{"freedom", 5, 5}, {"free", 5, 5}, {"government", 5, 5}, {"war", 5, 5}});
  const auto s = v.nearest_lexicographic("freedon", 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NE(std::find(s.begin(), s.end(), "freedom"), s.end());
}

TEST(Vocabulary, RoundTrip) {
  testutil::TempDir dir("vocab");
  const Vocabulary v({{"alpha", 7, 3}, {"beta", 2, 9}, {"gamma", 4, 4}});
  write_vocabulary(v, dir / "v.tsv");
  EXPECT_EQ(read_vocabulary(dir / "v.tsv"), v);
  write_vocabulary(v, dir / "vz.tsv", true);
  EXPECT_EQ(read_vocabulary(dir / "vz.tsv"), v);
}

TEST(Cooc, AdjacentPairWeighted) {
  const auto v = vocab_of({"a", "b"});
  const auto m = count_cooccurrences(make_corpus({{"a", "b"}}), v, {10, true, 1});
  EXPECT_DOUBLE_EQ(m.entry(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.entry(1, 0), 1.0);
}

TEST(Cooc, OutOfVocabularyKeepsDistance) {
  const auto v = vocab_of({"a", "b"});
  const auto m = count_cooccurrences(make_corpus({{"a", "x", "b"}}), v, {10, true, 1});
  EXPECT_DOUBLE_EQ(m.entry(0, 1), 0.5);
}

TEST(Cooc, UnweightedWindowOne) {
  const auto v = vocab_of({"a", "b"});
  const auto m = count_cooccurrences(make_corpus({{"a", "b", "a"}}), v, {1, false, 1});
  EXPECT_DOUBLE_EQ(m.entry(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(m.entry(0, 0), 0.0);
}

TEST(Cooc, DocumentBoundaries) {
  const auto v = vocab_of({"a", "b"});
  const auto m = count_cooccurrences(make_corpus({{"a"}, {"b"}}), v, {10, true, 1});
  EXPECT_EQ(m.nnz(), 0u);
}

TEST(Cooc, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f"};
  const auto v = vocab_of({"a", "b", "c", "d", "e"});
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> len(0, 25);
  for (int trial = 0; trial < 40; ++trial) {
    Corpus c;
    for (int d = 0; d < 6; ++d) {
      Document doc(len(rng));
      for (auto& t : doc) t = words[pick(rng)];
      c.documents.push_back(doc);
    }
    for (int window : {1, 3, 7}) {
      for (bool weighted : {true, false}) {
        const auto m = count_cooccurrences(c, v, {window, weighted, 1});
        const auto o = oracle_counts(c, v, window, weighted);
        double total = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
          double row = 0.0;
          for (std::size_t j = 0; j < v.size(); ++j) {
            const double want = o(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            ASSERT_NEAR(m.entry(i, j), want, 1e-12);
            row += want;
          }
          EXPECT_NEAR(m.row_sum(i), row, 1e-12);
          total += row;
        }
        EXPECT_NEAR(m.total(), total, 1e-12);
      }
    }
  }
}

TEST(Cooc, IndependentOfThreadsAndDocumentOrder) {
  std::mt19937_64 rng(5);
  const auto v = vocab_of({"a", "b", "c", "d"});
  const std::vector<std::string> words = {"a", "b", "c", "d", "z"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  Corpus c;
  for (int d = 0; d < 200; ++d) {
    Document doc(1 + d % 17);
    for (auto& t : doc) t = words[pick(rng)];
    c.documents.push_back(doc);
  }
  const auto base = count_cooccurrences(c, v, {10, true, 1});
  const auto threaded = count_cooccurrences(c, v, {10, true, 4});
  EXPECT_EQ(serialize_cooc(base), serialize_cooc(threaded));
  Corpus reversed = c;
  std::reverse(reversed.documents.begin(), reversed.documents.end());
  EXPECT_EQ(serialize_cooc(count_cooccurrences(reversed, v, {10, true, 1})), serialize_cooc(base));
}

TEST(Cooc, RoundTrip) {
  testutil::TempDir dir("cooc");
  std::mt19937_64 rng(2);
  const auto m = testutil::cooc_from_dense(testutil::random_counts(rng, 12, 0.4) / 7.0);
  write_cooc(m, dir / "c.txt");
  EXPECT_EQ(read_cooc(dir / "c.txt"), m);
  write_cooc(m, dir / "cz.txt", true);
  EXPECT_EQ(read_cooc(dir / "cz.txt"), m);
}

TEST(Cooc, FromUpperSumsDuplicatesAndRejectsNonPositive) {
  const auto m = CoocMatrix::from_upper(3, {{0, 1, 1.5}, {0, 1, 0.5}, {2, 2, 3.0}});
  EXPECT_DOUBLE_EQ(m.entry(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(m.entry(2, 2), 3.0);
  EXPECT_DOUBLE_EQ(m.total(), 7.0);
  EXPECT_EQ(m.nnz_upper(), 2u);
  EXPECT_ANY_THROW(CoocMatrix::from_upper(2, {{0, 1, 0.0}}));
}

TEST(CoocShare, FullRowEmptyRowAndOneNeighbor) {
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(4, 4);
  for (int j = 1; j < 4; ++j) full(0, j) = full(j, 0) = 1.0;
  const auto s = cooc_share(testutil::cooc_from_dense(full));
  EXPECT_DOUBLE_EQ(s[0], 3.0 / 4.0);

  Eigen::MatrixXd small = Eigen::MatrixXd::Zero(3, 3);
  small(0, 1) = small(1, 0) = 2.0;
  small(0, 0) = 5.0;
  const auto t = cooc_share(testutil::cooc_from_dense(small));
  EXPECT_DOUBLE_EQ(t[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(t[2], 0.0);
}

TEST(CorpusIo, RoundTripKeepsEmptyDocuments) {
  testutil::TempDir dir("corpus");
  const auto c = make_corpus({{"a", "b"}, {}, {"c"}});
  write_corpus(c, dir / "c.txt");
  EXPECT_EQ(read_corpus(dir / "c.txt"), c);
  write_corpus(c, dir / "cz.txt", true);
  EXPECT_EQ(read_corpus(dir / "cz.txt"), c);
}

TEST(TextIo, CompressedOutputIsByteStable) {
  testutil::TempDir dir("gz");
  write_file(dir / "a", "hello\nworld\n", true);
  write_file(dir / "b", "hello\nworld\n", true);
  EXPECT_EQ(read_file(dir / "a"), read_file(dir / "b"));
  EXPECT_EQ(file_checksum(dir / "a"), file_checksum(dir / "b"));
}

TEST(TextIo, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(split_csv("x,\"a,b\",\"q\"\"q\""), (std::vector<std::string>{"x", "a,b", "q\"q"}));
}

TEST(TextIo, RealFormattingRoundTrips) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = n(rng);
    EXPECT_EQ(parse_real(format_real(x)), x);
  }
}
