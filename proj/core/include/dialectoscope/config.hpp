#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dialectoscope/align.hpp"
#include "dialectoscope/corpus.hpp"
#include "dialectoscope/glove.hpp"
#include "dialectoscope/measures.hpp"
#include "dialectoscope/swapbench.hpp"

namespace dialectoscope {

enum class EcSource { Training, Raw };

struct PipelineConfig {
  // [corpus]
  std::filesystem::path corpus1;
  std::filesystem::path corpus2;
  bool dedup = true;
  std::uint64_t min_count = 100;
  CoocOptions cooc;

  // [glove]
  GloveConfig glove;

  // [align]
  AlignMethod method = AlignMethod::Procrustes;
  PrepareOptions prepare;

  // [measures]
  MeasureOptions measures;
  // Co-occurrence counts behind the EC criterion: the training matrix, or
  // unweighted window counts.
  EcSource ec_source = EcSource::Training;
  bool rank_absolute = false;

  // [dialectogram]
  std::vector<std::string> focals;  // dialectograms emitted by `run`
  std::vector<std::string> formats = {"json", "svg"};
  std::size_t exclude_top = 3;
  std::size_t label_count = 80;
  double threshold = 0.2;
  // Aggregate over all words (0) or the top-K words by sense separation.
  std::size_t aggregate_top = 0;

  // [swapbench]
  std::filesystem::path swap_corpus;
  std::filesystem::path pos_map;
  SwapSampling sampling;
  std::uint64_t swap_min_count = 20;

  // [pipeline]
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path output_dir = "out";
  bool compress = false;

  /// Checks value ranges and that the input corpora exist (ConfigError
  /// naming the offending key or path).
  void validate(bool require_corpora = true) const;
};

/// Parses an INI file with sections [corpus] [glove] [align] [measures]
/// [dialectogram] [swapbench] [pipeline]. Unknown sections or keys are
/// errors. Relative paths resolve against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Canonical `section.key=value` listing of every setting, sorted.
std::string canonical_config(const PipelineConfig& config, bool include_paths = true);
/// Hash of the settings that shape artifact contents. File locations are
/// left out; inputs are tracked by checksum instead.
std::string config_hash(const PipelineConfig& config);

/// Propagates the global seed and thread count into the module configs.
void apply_globals(PipelineConfig& config);

}  // namespace dialectoscope
