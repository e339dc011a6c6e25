#include <gtest/gtest.h>

#include <random>

#include "dialectoscope/dialectogram.hpp"
#include "dialectoscope/error.hpp"
#include "dialectoscope/textio.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace dialectoscope;
using testutil::gaussian;

namespace {

Vocabulary descending_vocab(std::size_t n) {
  std::vector<Vocabulary::Entry> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({"w" + std::to_string(i), 1000 - i, 900 - i});
  return Vocabulary(entries);
}

struct Fixture {
  AlignedPair pair;
  Vocabulary vocab;
  Eigen::MatrixXd d1, d2;
  CoocMatrix c1, c2;
};

Fixture random_fixture(std::mt19937_64& rng, std::size_t n, Eigen::Index dim, double density) {
  Fixture f;
  f.pair = testutil::unit_pair(gaussian(rng, static_cast<Eigen::Index>(n), dim),
                               gaussian(rng, static_cast<Eigen::Index>(n), dim));
  f.vocab = descending_vocab(n);
  f.pair.first.tokens = f.pair.second.tokens = f.vocab.tokens();
  f.d1 = testutil::random_counts(rng, static_cast<Eigen::Index>(n), density);
  f.d2 = testutil::random_counts(rng, static_cast<Eigen::Index>(n), density);
  f.c1 = testutil::cooc_from_dense(f.d1);
  f.c2 = testutil::cooc_from_dense(f.d2);
  return f;
}

}  // namespace

TEST(Projection, MatchesLoopOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = gaussian(rng, 10, 4), b = gaussian(rng, 10, 4);
    const auto pair = testutil::pair_of(a, b);
    const auto focal = static_cast<std::size_t>(trial % 10);
    const auto p = project_offset(pair, focal);
    const auto o = oracle::project(a, b, static_cast<Eigen::Index>(focal));
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_NEAR(p.alpha1[j], o.alpha1[j], 1e-12);
      EXPECT_NEAR(p.alpha2[j], o.alpha2[j], 1e-12);
    }
  }
}

TEST(Projection, OrthogonalWordProjectsToZeroAndFocalSign) {
  Matrix a(2, 3), b(2, 3);
  a << 1, 0, 0, 0, 1, 0;
  b << 0, 0, 1, 0, 1, 0;
  const auto p = project_offset(testutil::pair_of(a, b), 0);
  EXPECT_EQ(p.alpha1[1], 0.0);
  EXPECT_EQ(p.alpha2[1], 0.0);
  // The focal word's own projections straddle the origin toward corpus 1.
  EXPECT_GT(p.alpha1[0], 0.0);
  EXPECT_LT(p.alpha2[0], 0.0);
  EXPECT_NEAR(p.offset_norm, std::sqrt(2.0), 1e-15);
}

TEST(Projection, ZeroOffsetIsAnError) {
  const Matrix a = Matrix::Identity(2, 2);
  EXPECT_THROW(project_offset(testutil::pair_of(a, a), 0), DataError);
}

TEST(Dialectogram, IsolatedFocalHasNoRecords) {
  std::mt19937_64 rng(2);
  auto f = random_fixture(rng, 6, 3, 0.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 6);
  d(1, 2) = d(2, 1) = 3;
  f.c1 = f.c2 = testutil::cooc_from_dense(d);
  const auto dg = build_dialectogram(f.pair, f.vocab, f.c1, f.c2, 4, {0});
  EXPECT_TRUE(dg.records.empty());
  EXPECT_EQ(dg.focal, "w4");
  EXPECT_GT(dg.offset_norm, 0.0);
  EXPECT_FALSE(dg.translation_1to2.empty());
}

TEST(Dialectogram, EcClassesMatchOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_fixture(rng, 6, 3, 0.6);
    for (std::size_t focal = 0; focal < 6; ++focal) {
      if (f.d1.row(static_cast<Eigen::Index>(focal)).sum() == 0 ||
          f.d2.row(static_cast<Eigen::Index>(focal)).sum() == 0)
        continue;
      const auto dg = build_dialectogram(f.pair, f.vocab, f.c1, f.c2, focal, {1});
      const auto proj = oracle::project(f.pair.first.vectors, f.pair.second.vectors,
                                        static_cast<Eigen::Index>(focal));
      std::size_t expected_records = 0;
      for (std::size_t j = 1; j < 6; ++j) {
        const auto fj = static_cast<Eigen::Index>(focal), jj = static_cast<Eigen::Index>(j);
        if (j != focal && (f.d1(fj, jj) > 0 || f.d2(fj, jj) > 0)) ++expected_records;
      }
      ASSERT_EQ(dg.records.size(), expected_records);
      for (const auto& r : dg.records) {
        const auto j = static_cast<Eigen::Index>(*f.vocab.index_of(r.token));
        ASSERT_NE(j, 0);
        const bool hi1 = oracle::ec(f.d1, static_cast<Eigen::Index>(focal), j) > 1.0;
        const bool hi2 = oracle::ec(f.d2, static_cast<Eigen::Index>(focal), j) > 1.0;
        const EcClass want = hi1 && hi2 ? EcClass::Both
                             : hi1      ? EcClass::Only1
                             : hi2      ? EcClass::Only2
                                        : EcClass::Neither;
        EXPECT_EQ(r.ec_class, want);
        EXPECT_NEAR(r.alpha1, proj.alpha1[static_cast<std::size_t>(j)], 1e-12);
        EXPECT_NEAR(r.alpha2, proj.alpha2[static_cast<std::size_t>(j)], 1e-12);
      }
      EXPECT_EQ(dg.excluded, (std::vector<std::string>{"w0"}));
    }
  }
}

TEST(MeanOffset, IdenticalOffsetsNoFlips) {
  Matrix a(4, 2), b(4, 2);
  a << 1, 1, 2, 0, 0, 3, 5, 5;
  b = a;
  for (Eigen::Index i = 0; i < 3; ++i) b.row(i) -= Eigen::RowVector2d(0.3, 0.4);
  const auto m = mean_offset_projection(testutil::pair_of(a, b), {0, 1, 2}, 2);
  EXPECT_EQ(m.flipped, (std::vector<bool>{false, false, false}));
  EXPECT_NEAR(m.direction(0), 0.6, 1e-12);
  EXPECT_NEAR(m.direction(1), 0.8, 1e-12);
  EXPECT_EQ(m.top_positive1.size(), 2u);
}

TEST(MeanOffset, AntipodalPairFlipsOne) {
  Matrix a(2, 2), b(2, 2);
  a << 1, 0, -1, 0;
  b << 0, 0, 0, 0;
  const auto m = mean_offset_projection(testutil::pair_of(a, b), {0, 1});
  EXPECT_EQ(std::count(m.flipped.begin(), m.flipped.end(), true), 1);
  EXPECT_NEAR(std::abs(m.direction(0)), 1.0, 1e-12);
  EXPECT_NEAR(m.direction(1), 0.0, 1e-12);
}

TEST(MeanOffset, FlippedOffsetsAllAgreeWithDirection) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = gaussian(rng, 4, 3), b = gaussian(rng, 4, 3);
    const auto m = mean_offset_projection(testutil::pair_of(a, b), {0, 1, 2, 3});
    // Enumerate every sign pattern: the reported one must be among those whose
    // members all have nonnegative cosine with their own normalized mean.
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (Eigen::Index k = 0; k < 4; ++k) {
      const Eigen::Vector3d o = (a.row(k) - b.row(k)).transpose();
      sum += (m.flipped[static_cast<std::size_t>(k)] ? -1.0 : 1.0) * o;
    }
    EXPECT_LT((sum.normalized() - m.direction).norm(), 1e-12);
    for (Eigen::Index k = 0; k < 4; ++k) {
      const Eigen::Vector3d o = (a.row(k) - b.row(k)).transpose();
      const double s = (m.flipped[static_cast<std::size_t>(k)] ? -1.0 : 1.0) * o.dot(m.direction);
      EXPECT_GE(s, -1e-12);
    }
    int consistent = 0;
    for (int mask = 0; mask < 16; ++mask) {
      Eigen::Vector3d s = Eigen::Vector3d::Zero();
      for (int k = 0; k < 4; ++k) s += ((mask >> k) & 1 ? -1.0 : 1.0) * (a.row(k) - b.row(k)).transpose();
      bool ok = s.norm() > 1e-12;
      for (int k = 0; k < 4 && ok; ++k)
        ok = ((mask >> k) & 1 ? -1.0 : 1.0) * (a.row(k) - b.row(k)).dot(s.transpose()) >= 0;
      consistent += ok;
    }
    EXPECT_GE(consistent, 2);  // a pattern and its negation
  }
}

TEST(MeanOffset, NeedsTwoMembers) {
  const Matrix a = Matrix::Identity(3, 3);
  EXPECT_THROW(mean_offset_projection(testutil::pair_of(a, a), {0}), DataError);
  EXPECT_THROW(mean_offset_projection(testutil::pair_of(a, a), {0, 1}), DataError);
}

TEST(Aggregate, HighThresholdGivesZeros) {
  std::mt19937_64 rng(5);
  const auto f = random_fixture(rng, 8, 3, 0.5);
  const auto agg = aggregate_characteristic_use(f.pair, {2}, 10.0);
  for (const auto& r : agg.rows) EXPECT_EQ(r.score, 0);
}

TEST(Aggregate, ConstantProjectionScoresFocalCount) {
  // Word 5 sits at +0.3 along every focal offset.
  Matrix a = Matrix::Zero(6, 6), b = Matrix::Zero(6, 6);
  for (Eigen::Index f = 0; f < 5; ++f) {
    a(f, f) = 1.0;
    b(f, f) = -1.0;
  }
  a.row(5).head(5).setConstant(0.3);
  b.row(5) = a.row(5);
  const auto agg = aggregate_characteristic_use(testutil::pair_of(a, b), {0, 1, 2, 3, 4}, 0.2);
  EXPECT_EQ(agg.focals.size(), 5u);
  const auto it = std::find_if(agg.rows.begin(), agg.rows.end(),
                               [](const AggregateRow& r) { return r.index == 5; });
  ASSERT_NE(it, agg.rows.end());
  EXPECT_EQ(it->score, 5);
  EXPECT_EQ(it->count_pos, 5);
}

TEST(Aggregate, MatchesDoubleLoopOracleAndThreads) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_fixture(rng, 12, 4, 0.5);
    const std::vector<std::size_t> focals = {1, 4, 7};
    const auto agg = aggregate_characteristic_use(f.pair, focals, 0.2, 1);
    const auto want = oracle::aggregate(f.pair.first.vectors, f.pair.second.vectors, {1, 4, 7}, 0.2);
    ASSERT_EQ(agg.rows.size(), 12u);
    for (const auto& r : agg.rows) {
      EXPECT_EQ(r.score, want[r.index]);
      EXPECT_EQ(r.score, r.count_pos - r.count_neg);
    }
    for (std::size_t k = 1; k < agg.rows.size(); ++k)
      EXPECT_GE(agg.rows[k - 1].score, agg.rows[k].score);
    const auto threaded = aggregate_characteristic_use(f.pair, focals, 0.2, 3);
    EXPECT_EQ(threaded.rows, agg.rows);
  }
}

TEST(Aggregate, SkipsZeroOffsetFocals) {
  Matrix a = Matrix::Identity(3, 3), b = Matrix::Identity(3, 3);
  b(1, 1) = -1;
  const auto agg = aggregate_characteristic_use(testutil::pair_of(a, b), {0, 1}, 0.2);
  EXPECT_EQ(agg.focals, (std::vector<std::size_t>{1}));
  EXPECT_THROW(aggregate_characteristic_use(testutil::pair_of(a, b), {0}, 0.0), ConfigError);
}

TEST(Formats, JsonAndCsvRoundTrip) {
  std::mt19937_64 rng(7);
  const auto f = random_fixture(rng, 15, 4, 0.6);
  auto dg = build_dialectogram(f.pair, f.vocab, f.c1, f.c2, 5, {2});
  ASSERT_FALSE(dg.records.empty());
  dg.records[0].token = "with,comma \"quoted\"";
  EXPECT_EQ(dialectogram_from_json(dialectogram_to_json(dg)), dg);
  EXPECT_EQ(dialectogram_from_csv(dialectogram_to_csv(dg)), dg);

  testutil::TempDir dir("formats");
  export_dialectogram(dg, ExportFormat::Json, dir / "d.json");
  export_dialectogram(dg, ExportFormat::Csv, dir / "d.csv");
  EXPECT_EQ(import_dialectogram(dir / "d.json"), dg);
  EXPECT_EQ(import_dialectogram(dir / "d.csv"), dg);
  EXPECT_THROW(import_dialectogram(dir / "d.svg"), ConfigError);
}

TEST(Formats, MalformedInputIsDataError) {
  EXPECT_THROW(dialectogram_from_json("{not json"), DataError);
  EXPECT_THROW(dialectogram_from_csv("token,alpha1\nx,1\n"), DataError);
}

TEST(Formats, SvgIsDeterministicAndHandlesEmpty) {
  std::mt19937_64 rng(8);
  const auto f = random_fixture(rng, 30, 4, 0.5);
  const auto dg = build_dialectogram(f.pair, f.vocab, f.c1, f.c2, 3);
  const auto svg = dialectogram_to_svg(dg, {10});
  EXPECT_EQ(svg, dialectogram_to_svg(dg, {10}));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("w3"), std::string::npos);

  Dialectogram empty;
  empty.focal = "lonely";
  const auto e = dialectogram_to_svg(empty);
  EXPECT_NE(e.find("<svg"), std::string::npos);
  EXPECT_NE(e.find("</svg>"), std::string::npos);
  EXPECT_NE(e.find("<line"), std::string::npos);
  // Only the four legend markers remain.
  const auto circles = [](const std::string& text) {
    std::size_t n = 0;
    for (auto pos = text.find("<circle"); pos != std::string::npos; pos = text.find("<circle", pos + 1)) ++n;
    return n;
  };
  EXPECT_EQ(circles(e), 4u);
  EXPECT_EQ(circles(svg), 4u + dg.records.size());
}

TEST(Formats, ParseNames) {
  EXPECT_EQ(parse_export_format("svg"), ExportFormat::Svg);
  EXPECT_THROW(parse_export_format("png"), ConfigError);
  for (auto c : {EcClass::Both, EcClass::Only1, EcClass::Only2, EcClass::Neither})
    EXPECT_EQ(parse_ec_class(to_string(c)), c);
}

TEST(Formats, AggregateCsvAndMeanOffsetJson) {
  std::mt19937_64 rng(9);
  const auto f = random_fixture(rng, 10, 3, 0.5);
  const auto agg = aggregate_characteristic_use(f.pair, {0, 1, 2}, 0.1);
  const auto csv = aggregate_to_csv(agg);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
  const auto m = mean_offset_projection(f.pair, {0, 1, 2});
  EXPECT_NE(mean_offset_to_json(m).find("\"top_positive1\""), std::string::npos);
}
