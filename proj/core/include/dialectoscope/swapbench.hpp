#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dialectoscope/align.hpp"
#include "dialectoscope/corpus.hpp"
#include "dialectoscope/glove.hpp"
#include "dialectoscope/measures.hpp"

namespace dialectoscope {

using PosMap = std::unordered_map<std::string, std::string>;

/// `token<TAB>tag` per line.
PosMap read_pos_map(const std::filesystem::path& path);

struct SwapPair {
  std::string a;
  std::string b;
  double degree = 0.0;
  int decile = 0;
  friend bool operator==(const SwapPair&, const SwapPair&) = default;
};

struct SwapPlan {
  std::uint64_t seed = 0;
  int deciles = 10;
  std::vector<double> degrees;
  std::vector<SwapPair> pairs;
  bool pos_matched = false;
  std::string pos_map_checksum;

  /// Swap degree of a token, 0 when it is not part of any pair.
  double degree_of(const std::string& token) const;
  friend bool operator==(const SwapPlan&, const SwapPlan&) = default;
};

struct SwapSampling {
  int deciles = 10;
  int pairs_per_decile = 30;
  std::vector<double> degrees = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::uint64_t seed = 1;

  void validate() const;
};

/// Decile of each vocabulary word: equal-count rank bins over the counts in
/// `corpus` (1 or 2), most frequent first.
std::vector<int> frequency_deciles(const Vocabulary& vocab, int corpus, int deciles);

/// Draws frequency-matched (and, with a POS map, tag-matched) word pairs
/// without replacement. Degrees are dealt round-robin over the pairs in
/// decile order, so each degree is used equally often overall and, when the
/// number of degrees divides pairs_per_decile, equally often in every decile.
/// Throws DataError naming the decile that cannot supply enough pairs.
SwapPlan sample_swap_pairs(const Vocabulary& vocab, int corpus, const PosMap* pos_map,
                           const SwapSampling& sampling);

/// Each occurrence of a paired word is replaced by its partner with
/// probability equal to the pair's degree, one uniform draw per occurrence in
/// document order.
Corpus apply_swaps(const Corpus& corpus, const SwapPlan& plan, std::uint64_t seed);

std::string swap_plan_to_json(const SwapPlan& plan);
SwapPlan swap_plan_from_json(const std::string& text);

struct MeasureCorrelation {
  std::string measure;
  std::optional<double> spearman_all;       // nullopt when undefined
  std::optional<double> spearman_swapped;
  std::optional<double> spearman_frequency;  // against log mean frequency
  std::size_t n_all = 0;
  std::size_t n_swapped = 0;
};

struct TranslationAccuracy {
  double unswapped = 0.0;
  double below_half = 0.0;
  double above_half = 0.0;
  double half_self_rate = 0.0;
  std::size_t n_unswapped = 0;
  std::size_t n_below_half = 0;
  std::size_t n_above_half = 0;
  std::size_t n_half = 0;
};

struct EvalReport {
  std::vector<MeasureCorrelation> correlations;
  TranslationAccuracy translation;
  bool pos_matched = false;
  std::string decile_rule = "equal-count rank deciles";
  std::size_t vocabulary_size = 0;
  std::size_t swapped_words = 0;

  const MeasureCorrelation& measure(const std::string& name) const;
};

/// Spearman correlations of each measure against swap degree (0 for
/// unswapped words), over all words and over swapped words only, plus each
/// measure's correlation with log mean frequency.
std::vector<MeasureCorrelation> evaluate_measures(const MeasureTable& table, const SwapPlan& plan);

/// Unswapped and <50% words are correct when they translate to themselves in
/// both directions, >50% words when they translate to their partner in both
/// directions. Exactly-50% words only contribute a self-translation rate.
TranslationAccuracy translation_accuracy(const AlignedPair& pair, const SwapPlan& plan,
                                         int threads = 1);
TranslationAccuracy translation_accuracy(const std::vector<std::size_t>& forward,
                                         const std::vector<std::size_t>& backward,
                                         const std::vector<std::string>& tokens,
                                         const SwapPlan& plan);

std::string eval_report_to_json(const EvalReport& report);
/// One row per correlation kind (all words, swapped only, frequency), one
/// column per measure; undefined correlations are empty fields.
std::string eval_correlations_to_csv(const EvalReport& report);
/// One row with the four translation buckets and their sizes.
std::string eval_translation_to_csv(const EvalReport& report);

struct SwapbenchConfig {
  SwapSampling sampling;
  std::uint64_t min_count = 20;
  CoocOptions cooc;
  GloveConfig glove;
  PrepareOptions prepare;
  AlignMethod method = AlignMethod::Procrustes;
  MeasureOptions measures;
  std::uint64_t seed = 1;
};

struct SwapbenchResult {
  SwapPlan plan;
  Vocabulary vocab;
  MeasureTable table;
  EvalReport report;
};

/// Samples a plan on `original`, builds the swapped copy, trains one GloVe
/// model per corpus, aligns, measures and evaluates. Every random stream
/// (plan, swaps, both trainings) is derived from `config.seed`; the seed in
/// `config.sampling` is ignored.
SwapbenchResult run_swapbench(const Corpus& original, const SwapbenchConfig& config,
                              const PosMap* pos_map = nullptr,
                              const std::function<void(const std::string&)>& progress = {});

}  // namespace dialectoscope
