#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "dialectoscope/align.hpp"
#include "dialectoscope/corpus.hpp"
#include "dialectoscope/dialectogram.hpp"
#include "dialectoscope/glove.hpp"

using namespace dialectoscope;

namespace {

// Zipf-ish synthetic corpus over `vocab` words.
Corpus synthetic_corpus(std::size_t docs, std::size_t length, std::size_t vocab) {
  std::mt19937_64 rng(1);
  std::vector<double> weights(vocab);
  for (std::size_t i = 0; i < vocab; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  Corpus c;
  c.documents.resize(docs);
  for (auto& d : c.documents) {
    d.resize(length);
    for (auto& t : d) t = "w" + std::to_string(pick(rng));
  }
  return c;
}

Vocabulary synthetic_vocab(const Corpus& c) { return build_vocabulary(c, c, 1); }

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

EmbeddingSet random_embedding(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  EmbeddingSet e;
  e.vectors = normalize_rows(random_matrix(rows, cols, seed));
  for (Eigen::Index i = 0; i < rows; ++i) e.tokens.push_back("w" + std::to_string(i));
  e.normalized = true;
  return e;
}

void BM_CoocCount(benchmark::State& state) {
  const auto corpus = synthetic_corpus(2000, 50, 2000);
  const auto vocab = synthetic_vocab(corpus);
  CoocOptions opt;
  opt.window = static_cast<int>(state.range(0));
  opt.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(count_cooccurrences(corpus, vocab, opt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.token_count()));
}
BENCHMARK(BM_CoocCount)->Args({5, 1})->Args({10, 1})->Args({10, 4})->Unit(benchmark::kMillisecond);

void BM_GloveEpoch(benchmark::State& state) {
  const auto corpus = synthetic_corpus(2000, 50, 2000);
  const auto vocab = synthetic_vocab(corpus);
  const auto cooc = count_cooccurrences(corpus, vocab, {});
  GloveConfig config;
  config.dim = static_cast<int>(state.range(0));
  config.epochs = 1;
  config.threads = static_cast<int>(state.range(1));
  auto params = init_params(vocab.size(), config);
  std::vector<double> trace;
  for (auto _ : state) train_epochs(params, cooc, config, trace);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cooc.nnz()));
}
BENCHMARK(BM_GloveEpoch)->Args({50, 1})->Args({300, 1})->Args({300, 4})->Unit(benchmark::kMillisecond);

void BM_Procrustes(benchmark::State& state) {
  const auto n = state.range(0), d = state.range(1);
  const auto e1 = random_embedding(n, d, 1), e2 = random_embedding(n, d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(procrustes_align(e1, e2));
}
BENCHMARK(BM_Procrustes)->Args({5000, 50})->Args({5000, 300})->Unit(benchmark::kMillisecond);

void BM_TranslateAll(benchmark::State& state) {
  const auto n = state.range(0);
  AlignedPair pair;
  pair.first = random_embedding(n, 100, 3);
  pair.second = random_embedding(n, 100, 4);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mistranslation_set(pair, threads));
}
BENCHMARK(BM_TranslateAll)->Args({5000, 1})->Args({5000, 4})->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  const auto n = state.range(0);
  AlignedPair pair;
  pair.first = random_embedding(n, 100, 5);
  pair.second = random_embedding(n, 100, 6);
  std::vector<std::size_t> focals(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < focals.size(); ++i) focals[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_characteristic_use(pair, focals, 0.2, 4));
}
BENCHMARK(BM_Aggregate)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
