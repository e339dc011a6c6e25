#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "dialectoscope/error.hpp"
#include "dialectoscope/swapbench.hpp"
#include "dialectoscope/textio.hpp"
#include "test_util.hpp"

using namespace dialectoscope;

namespace {

Vocabulary graded_vocab(std::size_t n) {
  std::vector<Vocabulary::Entry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::uint64_t>(10 * (n - i));
    entries.push_back({"w" + std::to_string(i), c, c});
  }
  return Vocabulary(entries);
}

std::size_t count_of(const Corpus& c, const std::string& token) {
  std::size_t n = 0;
  for (const auto& d : c.documents) n += static_cast<std::size_t>(std::count(d.begin(), d.end(), token));
  return n;
}

SwapPlan single_pair(const std::string& a, const std::string& b, double degree) {
  SwapPlan plan;
  plan.degrees = {degree};
  plan.deciles = 1;
  plan.pairs.push_back({a, b, degree, 0});
  return plan;
}

}  // namespace

TEST(Sampling, DefaultCounts) {
  const auto v = graded_vocab(700);
  SwapSampling s;
  const auto plan = sample_swap_pairs(v, 1, nullptr, s);
  EXPECT_EQ(plan.pairs.size(), 300u);
  std::set<std::string> words;
  for (const auto& p : plan.pairs) words.insert(p.a), words.insert(p.b);
  EXPECT_EQ(words.size(), 600u);
  std::map<double, int> per_degree;
  for (const auto& p : plan.pairs) ++per_degree[p.degree];
  for (const auto& [d, n] : per_degree) EXPECT_EQ(n, 30);
}

TEST(Sampling, OnePairPerCellAndFrequencyMatched) {
  const auto v = graded_vocab(200);
  SwapSampling s;
  s.pairs_per_decile = 10;
  const auto plan = sample_swap_pairs(v, 1, nullptr, s);
  const auto deciles = frequency_deciles(v, 1, 10);
  std::map<std::pair<int, double>, int> cells;
  for (const auto& p : plan.pairs) {
    ++cells[{p.decile, p.degree}];
    EXPECT_EQ(deciles[*v.index_of(p.a)], p.decile);
    EXPECT_EQ(deciles[*v.index_of(p.b)], p.decile);
  }
  EXPECT_EQ(cells.size(), 100u);
  for (const auto& [cell, n] : cells) EXPECT_EQ(n, 1);
}

TEST(Sampling, TwentyWordsTwoPairsPerDecileUsesEverything) {
  const auto v = graded_vocab(20);
  SwapSampling s;
  s.pairs_per_decile = 1;
  const auto plan = sample_swap_pairs(v, 1, nullptr, s);
  std::set<std::string> used;
  for (const auto& p : plan.pairs) used.insert(p.a), used.insert(p.b);
  EXPECT_EQ(used.size(), 20u);
  s.pairs_per_decile = 2;
  s.degrees = {0.5, 1.0};
  EXPECT_THROW(sample_swap_pairs(v, 1, nullptr, s), DataError);
}

TEST(Sampling, PosInfeasibleDecileIsReported) {
  const auto v = graded_vocab(20);
  PosMap pos;
  for (std::size_t i = 0; i < 20; ++i) pos[v.token(i)] = i % 2 ? "NOUN" : "VERB";
  SwapSampling s;
  s.pairs_per_decile = 1;
  // Each decile holds one noun and one verb: no tag-matched pair exists.
  try {
    sample_swap_pairs(v, 1, &pos, s);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("decile 0"), std::string::npos);
  }
  for (std::size_t i = 0; i < 20; ++i) pos[v.token(i)] = "NOUN";
  const auto plan = sample_swap_pairs(v, 1, &pos, s);
  EXPECT_TRUE(plan.pos_matched);
  EXPECT_FALSE(plan.pos_map_checksum.empty());
}

TEST(Sampling, SeededAndValidated) {
  const auto v = graded_vocab(300);
  SwapSampling s;
  s.pairs_per_decile = 6;
  EXPECT_EQ(sample_swap_pairs(v, 1, nullptr, s), sample_swap_pairs(v, 1, nullptr, s));
  SwapSampling other = s;
  other.seed = 2;
  EXPECT_NE(sample_swap_pairs(v, 1, nullptr, other).pairs, sample_swap_pairs(v, 1, nullptr, s).pairs);
  s.pairs_per_decile = 7;
  s.degrees = {0.2, 0.5, 1.0};
  EXPECT_THROW(s.validate(), ConfigError);
  s.pairs_per_decile = 6;
  s.degrees = {1.5};
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Deciles, EqualCountBins) {
  const auto d = frequency_deciles(graded_vocab(35), 1, 10);
  std::map<int, int> sizes;
  for (int x : d) ++sizes[x];
  EXPECT_EQ(sizes.size(), 10u);
  for (const auto& [k, n] : sizes) EXPECT_TRUE(n == 3 || n == 4);
  EXPECT_EQ(d[0], 0);
  EXPECT_EQ(d[34], 9);
}

TEST(PlanJson, RoundTrip) {
  SwapSampling s;
  s.pairs_per_decile = 3;
  s.degrees = {0.1, 0.5, 1.0};
  const auto plan = sample_swap_pairs(graded_vocab(100), 1, nullptr, s);
  EXPECT_EQ(swap_plan_from_json(swap_plan_to_json(plan)), plan);
  EXPECT_THROW(swap_plan_from_json("{\"seed\": 1}"), DataError);
}

TEST(ApplySwaps, FullDegreeExchangesCounts) {
  Corpus c;
  c.documents = {{"a", "x", "a", "b"}, {"b", "b", "y"}, {"a"}};
  const auto out = apply_swaps(c, single_pair("a", "b", 1.0), 3);
  EXPECT_EQ(count_of(out, "a"), 3u);
  EXPECT_EQ(count_of(out, "b"), 3u);
  EXPECT_EQ(out.documents[0], (Document{"b", "x", "b", "a"}));
  EXPECT_EQ(out.documents[1], (Document{"a", "a", "y"}));
}

TEST(ApplySwaps, ZeroDegreeIsIdentity) {
  Corpus c;
  c.documents = {{"a", "b", "c"}, {"b", "a"}};
  EXPECT_EQ(apply_swaps(c, single_pair("a", "b", 0.0), 9), c);
}

TEST(ApplySwaps, HalfDegreeConcentrates) {
  Corpus c;
  Document doc(10000, "a");
  c.documents.push_back(doc);
  const auto out = apply_swaps(c, single_pair("a", "b", 0.5), 12345);
  const double frac = static_cast<double>(count_of(out, "b")) / 10000.0;
  EXPECT_NEAR(frac, 0.5, 0.02);
  EXPECT_EQ(out.token_count(), c.token_count());
}

TEST(ApplySwaps, PreservesShapeAndOtherTokens) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  Corpus c;
  for (int i = 0; i < 50; ++i) {
    Document d(static_cast<std::size_t>(i % 9));
    for (auto& t : d) t = words[rng() % words.size()];
    c.documents.push_back(d);
  }
  const auto plan = single_pair("a", "b", 0.3);
  const auto out = apply_swaps(c, plan, 4);
  ASSERT_EQ(out.documents.size(), c.documents.size());
  for (std::size_t i = 0; i < c.documents.size(); ++i) {
    ASSERT_EQ(out.documents[i].size(), c.documents[i].size());
    for (std::size_t k = 0; k < c.documents[i].size(); ++k) {
      const auto& before = c.documents[i][k];
      if (before != "a" && before != "b") EXPECT_EQ(out.documents[i][k], before);
    }
  }
  EXPECT_EQ(count_of(out, "a") + count_of(out, "b"), count_of(c, "a") + count_of(c, "b"));
  EXPECT_EQ(apply_swaps(c, plan, 4), out);
}

TEST(Evaluate, MeasureEqualToDegreeAndConstantMeasure) {
  SwapPlan plan;
  plan.degrees = {0.2, 0.6, 1.0};
  plan.pairs = {{"a", "b", 0.2, 0}, {"c", "d", 0.6, 0}, {"e", "f", 1.0, 0}};
  MeasureTable t;
  for (const auto* tok : {"a", "b", "c", "d", "e", "f", "g", "h"}) {
    MeasureRow r;
    r.token = tok;
    r.freq1 = r.freq2 = 10;
    r.cosine_distance = plan.degree_of(tok);
    r.svm_distance = 1.0;
    t.rows.push_back(r);
  }
  const auto corr = evaluate_measures(t, plan);
  EvalReport report;
  report.correlations = corr;
  const auto& cos = report.measure("cosine_distance");
  EXPECT_NEAR(*cos.spearman_all, 1.0, 1e-12);
  EXPECT_NEAR(*cos.spearman_swapped, 1.0, 1e-12);
  EXPECT_EQ(cos.n_all, 8u);
  EXPECT_EQ(cos.n_swapped, 6u);
  EXPECT_FALSE(report.measure("svm_distance").spearman_all.has_value());
  EXPECT_FALSE(report.measure("sense_separation").spearman_all.has_value());
  EXPECT_THROW(report.measure("nope"), DataError);
  const auto csv = eval_correlations_to_csv(report);
  EXPECT_NE(csv.find("cosine_distance"), std::string::npos);
}

TEST(Translation, IdentityCorporaAndExchangedRows) {
  std::mt19937_64 rng(5);
  const Matrix e = normalize_rows(testutil::gaussian(rng, 10, 4));
  auto same = testutil::unit_pair(e, e);
  const auto acc = translation_accuracy(same, SwapPlan{});
  EXPECT_EQ(acc.unswapped, 1.0);
  EXPECT_EQ(acc.n_unswapped, 10u);

  Matrix swapped = e;
  swapped.row(2) = e.row(5);
  swapped.row(5) = e.row(2);
  const auto pair = testutil::unit_pair(e, swapped);
  const auto full = translation_accuracy(pair, single_pair("w2", "w5", 1.0));
  EXPECT_EQ(full.above_half, 1.0);
  EXPECT_EQ(full.n_above_half, 2u);
  EXPECT_EQ(full.unswapped, 1.0);
  const auto low = translation_accuracy(pair, single_pair("w2", "w5", 0.3));
  EXPECT_EQ(low.below_half, 0.0);
  const auto half = translation_accuracy(same, single_pair("w2", "w5", 0.5));
  EXPECT_EQ(half.n_half, 2u);
  EXPECT_EQ(half.half_self_rate, 1.0);
}

TEST(Translation, BucketsFromIndexVectors) {
  const std::vector<std::string> tokens = {"a", "b", "c", "d"};
  SwapPlan plan;
  plan.pairs = {{"a", "b", 0.8, 0}};
  // a -> b both ways, b -> a forward only.
  const auto acc = translation_accuracy({1, 0, 2, 2}, {1, 1, 2, 3}, tokens, plan);
  EXPECT_EQ(acc.n_above_half, 2u);
  EXPECT_DOUBLE_EQ(acc.above_half, 0.5);
  EXPECT_DOUBLE_EQ(acc.unswapped, 0.5);
}

TEST(PosMap, ReadsTabSeparated) {
  testutil::TempDir dir("pos");
  write_file(dir / "p.tsv", "run\tVERB\ndog\tNOUN\n");
  const auto m = read_pos_map(dir / "p.tsv");
  EXPECT_EQ(m.at("dog"), "NOUN");
  write_file(dir / "bad.tsv", "nodelimiter\n");
  EXPECT_THROW(read_pos_map(dir / "bad.tsv"), DataError);
}
