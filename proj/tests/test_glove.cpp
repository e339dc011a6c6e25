#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dialectoscope/error.hpp"
#include "dialectoscope/glove.hpp"
#include "dialectoscope/textio.hpp"
#include "test_util.hpp"

using namespace dialectoscope;

namespace {

GloveParams zero_params(std::size_t n, int dim) {
  GloveConfig c;
  c.dim = dim;
  auto p = init_params(n, c);
  p.word.setZero();
  p.context.setZero();
  p.word_bias.setZero();
  p.context_bias.setZero();
  return p;
}

GloveParams random_params(std::mt19937_64& rng, std::size_t n, int dim, double scale) {
  auto p = zero_params(n, dim);
  p.word = testutil::gaussian(rng, static_cast<Eigen::Index>(n), dim) * scale;
  p.context = testutil::gaussian(rng, static_cast<Eigen::Index>(n), dim) * scale;
  const Matrix b = testutil::gaussian(rng, static_cast<Eigen::Index>(n), 2) * scale;
  p.word_bias = b.col(0);
  p.context_bias = b.col(1);
  return p;
}

// Five words in two loose clusters.
CoocMatrix synthetic_five() {
  Eigen::MatrixXd c(5, 5);
  c << 0, 40, 25, 2, 1,
       40, 0, 30, 1, 3,
       25, 30, 0, 4, 2,
       2, 1, 4, 0, 50,
       1, 3, 2, 50, 0;
  return testutil::cooc_from_dense(c);
}

}  // namespace

TEST(Weighting, DefaultCapAndClosedForm) {
  GloveConfig c;
  EXPECT_DOUBLE_EQ(weight_fn(c.x_max, c), 1.0);
  EXPECT_DOUBLE_EQ(weight_fn(5 * c.x_max, c), 1.0);
  EXPECT_NEAR(weight_fn(c.x_max / 2, c), 0.594604, 1e-6);
}

TEST(Weighting, UniformIsOne) {
  GloveConfig c;
  c.weighting = Weighting::Uniform;
  for (double x : {0.01, 1.0, 37.0, 1e6}) EXPECT_EQ(weight_fn(x, c), 1.0);
}

TEST(Weighting, InvertedDecreasesAndIsFloored) {
  GloveConfig c;
  c.weighting = Weighting::Inverted;
  EXPECT_GT(weight_fn(1.0, c), weight_fn(50.0, c));
  EXPECT_DOUBLE_EQ(weight_fn(c.x_max, c), 0.01);
  EXPECT_EQ(parse_weighting(to_string(Weighting::Inverted)), Weighting::Inverted);
}

TEST(Loss, HandValues) {
  GloveConfig c;
  auto p = zero_params(1, 4);
  EXPECT_NEAR(pair_loss(p, 0, 0, c.x_max, c), std::pow(std::log(c.x_max), 2), 1e-12);
  p.word_bias(0) = 1.0;
  EXPECT_NEAR(pair_residual(p, 0, 0, std::exp(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(pair_loss(p, 0, 0, std::exp(1.0), c), 0.0, 1e-15);
}

TEST(Loss, ExactFitIsZero) {
  std::mt19937_64 rng(4);
  auto p = random_params(rng, 4, 3, 0.3);
  // Symmetric parameters, so both triangles of a symmetric X can fit exactly.
  p.context = p.word;
  p.context_bias = p.word_bias;
  std::vector<CoocEntry> upper;
  for (std::uint32_t i = 0; i < 4; ++i)
    for (std::uint32_t j = i; j < 4; ++j)
      upper.push_back({i, j, std::exp(p.word.row(i).dot(p.context.row(j)) + p.word_bias(i) +
                                       p.context_bias(j))});
  const auto cooc = CoocMatrix::from_upper(4, upper);
  EXPECT_NEAR(loss(p, cooc, GloveConfig{}), 0.0, 1e-20);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> xs(0.5, 150.0);
  GloveConfig c;
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 5;
    auto p = random_params(rng, 3, dim, 0.5);
    const std::size_t i = trial % 3, j = (trial / 3) % 3;
    const double x = xs(rng);
    const auto g = pair_gradient(p, i, j, x, c);
    auto fd = [&](double& slot) {
      const double keep = slot;
      slot = keep + h;
      const double up = pair_loss(p, i, j, x, c);
      slot = keep - h;
      const double down = pair_loss(p, i, j, x, c);
      slot = keep;
      return (up - down) / (2 * h);
    };
    auto check = [&](double analytic, double numeric) {
      const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
      EXPECT_LT(std::abs(analytic - numeric) / scale, 1e-4);
    };
    for (int k = 0; k < dim; ++k) {
      check(g.word(k), fd(p.word(static_cast<Eigen::Index>(i), k)));
      check(g.context(k), fd(p.context(static_cast<Eigen::Index>(j), k)));
    }
    check(g.word_bias, fd(p.word_bias(static_cast<Eigen::Index>(i))));
    check(g.context_bias, fd(p.context_bias(static_cast<Eigen::Index>(j))));
  }
}

TEST(Gradient, FullGradientAssemblesPairTerms) {
  std::mt19937_64 rng(3);
  const auto cooc = synthetic_five();
  GloveConfig c;
  auto p = random_params(rng, 5, 3, 0.4);
  const auto g = loss_gradient(p, cooc, c);
  const double h = 1e-6;
  for (Eigen::Index r = 0; r < 5; ++r) {
    for (Eigen::Index k = 0; k < 3; ++k) {
      const double keep = p.word(r, k);
      p.word(r, k) = keep + h;
      const double up = loss(p, cooc, c);
      p.word(r, k) = keep - h;
      const double down = loss(p, cooc, c);
      p.word(r, k) = keep;
      EXPECT_NEAR(g.word(r, k), (up - down) / (2 * h), 1e-4 * std::max(1.0, std::abs(g.word(r, k))));
    }
  }
}

TEST(Train, InitRange) {
  GloveConfig c;
  c.dim = 8;
  const auto p = init_params(50, c);
  EXPECT_LE(max_abs(p.word), 0.5 / 8);
  EXPECT_LE(max_abs(p.context), 0.5 / 8);
  EXPECT_TRUE((p.word_sq.array() == 1.0).all());
}

TEST(Train, FiveWordLossDropsBelowTenPercent) {
  GloveConfig c;
  c.dim = 10;
  c.epochs = 50;
  c.seed = 7;
  const auto r = train(synthetic_five(), c);
  ASSERT_EQ(r.loss_trace.size(), 51u);
  EXPECT_LT(r.loss_trace.back(), 0.1 * r.loss_trace.front());
}

TEST(Train, SingleThreadIsBitReproducible) {
  GloveConfig c;
  c.dim = 6;
  c.epochs = 10;
  c.seed = 99;
  const auto a = train(synthetic_five(), c);
  const auto b = train(synthetic_five(), c);
  EXPECT_TRUE(a.params.word == b.params.word);
  EXPECT_TRUE(a.params.context == b.params.context);
  EXPECT_TRUE(a.params.word_bias == b.params.word_bias);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  c.seed = 100;
  EXPECT_FALSE(train(synthetic_five(), c).params.word == a.params.word);
}

TEST(Train, SplitEpochsMatchOneRun) {
  GloveConfig c;
  c.dim = 4;
  c.epochs = 6;
  const auto whole = train(synthetic_five(), c);
  c.epochs = 3;
  auto part = train(synthetic_five(), c);
  train_epochs(part.params, synthetic_five(), c, part.loss_trace);
  EXPECT_EQ(part.loss_trace.size(), whole.loss_trace.size());
  EXPECT_LT(part.loss_trace.back(), part.loss_trace.front());
}

TEST(Train, HogwildStillConverges) {
  GloveConfig c;
  c.dim = 10;
  c.epochs = 50;
  c.threads = 3;
  const auto r = train(synthetic_five(), c);
  EXPECT_LT(r.loss_trace.back(), 0.2 * r.loss_trace.front());
}

TEST(Train, FrequentWordsGetLargerBiases) {
  // Word 0 co-occurs heavily with everyone, word 4 barely.
  Eigen::MatrixXd m(5, 5);
  m << 0, 90, 80, 70, 60,
       90, 0, 8, 6, 3,
       80, 8, 0, 5, 2,
       70, 6, 5, 0, 1,
       60, 3, 2, 1, 0;
  GloveConfig c;
  c.dim = 4;
  c.epochs = 100;
  const auto r = train(testutil::cooc_from_dense(m), c);
  EXPECT_GT(r.params.word_bias(0) + r.params.context_bias(0),
            r.params.word_bias(4) + r.params.context_bias(4));
}

TEST(Train, RejectsBadConfig) {
  GloveConfig c;
  c.dim = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.learning_rate = -1;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Finalize, SumRuleAndNormalization) {
  auto p = zero_params(2, 2);
  p.word.row(0) << 1.5, 2.0;
  p.context.row(0) << 1.5, 2.0;
  p.word.row(1) << 0.25, -1.0;
  p.context.row(1) << 0.5, 0.125;
  const auto raw = finalize_embedding(p, {"a", "b"}, false);
  EXPECT_EQ(raw.vectors(0, 0), 3.0);
  EXPECT_EQ(raw.vectors(0, 1), 4.0);
  EXPECT_EQ(raw.vectors(1, 0), 0.75);
  EXPECT_EQ(raw.vectors(1, 1), -0.875);
  const auto unit = finalize_embedding(p, {"a", "b"}, true);
  EXPECT_NEAR(unit.vectors(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(unit.vectors(0, 1), 0.8, 1e-15);
  EXPECT_TRUE(unit.normalized);
}

TEST(Finalize, ZeroRowCannotBeNormalized) {
  const auto p = zero_params(1, 3);
  EXPECT_THROW(finalize_embedding(p, {"a"}, true), DataError);
}

TEST(Embeddings, TextRoundTripNineDigits) {
  testutil::TempDir dir("emb");
  std::mt19937_64 rng(1);
  const auto e = testutil::embedding(testutil::gaussian(rng, 7, 5));
  write_embeddings(e, dir / "e.txt");
  const auto back = read_embeddings(dir / "e.txt");
  EXPECT_EQ(back.tokens, e.tokens);
  EXPECT_LT(max_abs(back.vectors - e.vectors), 1e-8 * (1 + max_abs(e.vectors)));
  // A second write of the reloaded set reproduces the same bytes.
  write_embeddings(back, dir / "f.txt");
  EXPECT_EQ(read_file(dir / "e.txt"), read_file(dir / "f.txt"));
}

TEST(Embeddings, SkipsWord2VecHeader) {
  testutil::TempDir dir("w2v");
  write_file(dir / "e.txt", "2 3\nx 1 2 3\ny 4 5 6\n");
  const auto e = read_embeddings(dir / "e.txt");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e.vectors(1, 2), 6.0);
}

TEST(Embeddings, RestrictToVocabularyOrder) {
  EmbeddingSet e{{"x", "y", "z"}, Matrix::Identity(3, 3), false};
  const Vocabulary v({{"z", 9, 9}, {"x", 1, 1}});
  const auto r = restrict_to(e, v);
  EXPECT_EQ(r.tokens, (std::vector<std::string>{"z", "x"}));
  EXPECT_EQ(r.vectors(0, 2), 1.0);
  const Vocabulary missing({{"w", 1, 1}});
  EXPECT_THROW(restrict_to(e, missing), DataError);
}
