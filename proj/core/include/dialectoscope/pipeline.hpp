#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dialectoscope/config.hpp"
#include "dialectoscope/corpus.hpp"

namespace dialectoscope {

enum class Stage { Ingest, Vocab, Cooc, Train, Prepare, Align, Measures, Dialectograms };

inline constexpr Stage kAllStages[] = {Stage::Ingest,  Stage::Vocab, Stage::Cooc,     Stage::Train,
                                       Stage::Prepare, Stage::Align, Stage::Measures, Stage::Dialectograms};

std::string to_string(Stage s);
Stage parse_stage(const std::string& name);

struct StageRange {
  Stage from = Stage::Ingest;
  Stage to = Stage::Dialectograms;
};

/// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* kCorpus1 = "corpus1.txt";
inline constexpr const char* kCorpus2 = "corpus2.txt";
inline constexpr const char* kVocab = "vocab.tsv";
inline constexpr const char* kCooc1 = "cooc1.txt";
inline constexpr const char* kCooc2 = "cooc2.txt";
// Unweighted window counts, written only when the EC source is `raw`.
inline constexpr const char* kRawCooc1 = "cooc1.raw.txt";
inline constexpr const char* kRawCooc2 = "cooc2.raw.txt";
inline constexpr const char* kRaw1 = "embeddings1.raw.txt";
inline constexpr const char* kRaw2 = "embeddings2.raw.txt";
inline constexpr const char* kLoss1 = "loss1.csv";
inline constexpr const char* kLoss2 = "loss2.csv";
inline constexpr const char* kPrepared1 = "prepared1.txt";
inline constexpr const char* kPrepared2 = "prepared2.txt";
inline constexpr const char* kAligned = "aligned";  // prefix of aligned.{first.txt,second.txt,json}
inline constexpr const char* kMeasures = "measures.csv";
inline constexpr const char* kRanking = "ranking.csv";
inline constexpr const char* kDialectograms = "dialectograms";
inline constexpr const char* kAggregate = "aggregate.csv";
}  // namespace artifact

/// Sidecar stored next to every artifact as `<file>.meta.json`.
struct ArtifactMeta {
  std::string stage;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::map<std::string, std::string> inputs;  // input file name -> checksum
  std::string checksum;                        // of the artifact itself

  friend bool operator==(const ArtifactMeta&, const ArtifactMeta&) = default;
};

std::string toolkit_version();
std::filesystem::path meta_path(const std::filesystem::path& artifact);
void write_meta(const std::filesystem::path& artifact, const ArtifactMeta& meta);
/// Returns false when the sidecar is missing or unreadable.
bool read_meta(const std::filesystem::path& artifact, ArtifactMeta& meta);

/// Index of `token`, or DataError listing the nearest vocabulary spellings.
std::size_t require_token(const Vocabulary& vocab, const std::string& token);

/// Ranking rows by sense separation: `rank,token,sense_separation,cosine_distance,freq1,freq2`.
std::string serialize_ranking(const MeasureTable& table, bool absolute);

struct StageReport {
  Stage stage;
  bool skipped = false;
};

using LogFn = std::function<void(const std::string&)>;

/// Runs the stages in `range` in their fixed order. Each stage reads its
/// inputs from files in the output directory, and is skipped when all of its
/// outputs exist with sidecars matching the current config hash, seed, input
/// checksums and output checksums.
std::vector<StageReport> run_pipeline(const PipelineConfig& config, StageRange range = {},
                                      const LogFn& log = {});

/// Files a completed run leaves in the output directory (sidecars excluded).
std::vector<std::filesystem::path> declared_artifacts(const PipelineConfig& config);

}  // namespace dialectoscope
