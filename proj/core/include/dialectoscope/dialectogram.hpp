#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dialectoscope/align.hpp"
#include "dialectoscope/corpus.hpp"

namespace dialectoscope {

/// Which corpora show excess co-occurrence (EC > 1) between a record and the
/// focal word.
enum class EcClass { Both, Only1, Only2, Neither };

std::string to_string(EcClass c);
EcClass parse_ec_class(const std::string& name);

struct DialectogramRecord {
  std::string token;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::uint64_t freq1 = 0;
  std::uint64_t freq2 = 0;
  EcClass ec_class = EcClass::Neither;

  friend bool operator==(const DialectogramRecord&, const DialectogramRecord&) = default;
};

/// Scalar projections of the focal word's co-occurring vocabulary onto its
/// unit offset. Positive values point toward corpus 1's embedding of the
/// focal word.
struct Dialectogram {
  std::string focal;
  std::size_t focal_index = 0;
  double offset_norm = 0.0;
  std::string translation_1to2;
  std::string translation_2to1;
  std::vector<std::string> excluded;
  std::vector<DialectogramRecord> records;

  friend bool operator==(const Dialectogram&, const Dialectogram&) = default;
};

struct Projection {
  std::vector<double> alpha1;
  std::vector<double> alpha2;
  double offset_norm = 0.0;
};

/// alpha_k = E_k,aligned . O / ||O|| with O = E1a[focal] - E2a[focal].
/// Throws DataError if ||O|| <= 1e-12.
Projection project_offset(const AlignedPair& pair, std::size_t focal);

struct DialectogramOptions {
  // Number of most frequent vocabulary words left out of every plot.
  std::size_t exclude_top = 3;
};

Dialectogram build_dialectogram(const AlignedPair& pair, const Vocabulary& vocab,
                                const CoocMatrix& cooc1, const CoocMatrix& cooc2,
                                std::size_t focal, const DialectogramOptions& options = {});

struct ScoredWord {
  std::size_t index = 0;
  std::string token;
  double value = 0.0;
  friend bool operator==(const ScoredWord&, const ScoredWord&) = default;
};

struct MeanOffsetProjection {
  std::vector<std::size_t> members;
  std::vector<std::string> member_tokens;
  Vector direction;            // unit
  std::vector<bool> flipped;   // per member
  std::vector<double> member_alpha1;
  std::vector<double> member_alpha2;
  // Most positive / most negative vocabulary words in each space.
  std::vector<ScoredWord> top_positive1, top_negative1, top_positive2, top_negative2;
};

/// Mean offset of a word set with members pointing against the mean flipped.
/// Throws DataError for fewer than two members or a degenerate mean.
MeanOffsetProjection mean_offset_projection(const AlignedPair& pair,
                                            const std::vector<std::size_t>& members,
                                            std::size_t top_k = 20);

struct AggregateRow {
  std::size_t index = 0;
  std::string token;
  int count_pos = 0;
  int count_neg = 0;
  int score = 0;
  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

struct AggregateScore {
  double threshold = 0.2;
  std::vector<std::size_t> focals;  // focal words actually used
  std::vector<AggregateRow> rows;   // descending score, then vocabulary order
};

/// For every word j and focal i, m_ij = (alpha1_ij + alpha2_ij) / 2; the score
/// of j is #{i : m_ij > t} - #{i : m_ij < -t}. Focal words with a zero offset
/// are skipped.
AggregateScore aggregate_characteristic_use(const AlignedPair& pair,
                                            const std::vector<std::size_t>& focals,
                                            double threshold, int threads = 1);

std::string dialectogram_to_json(const Dialectogram& d);
Dialectogram dialectogram_from_json(const std::string& text);
std::string dialectogram_to_csv(const Dialectogram& d);
Dialectogram dialectogram_from_csv(const std::string& text);

struct SvgOptions {
  std::size_t label_count = 80;
};
std::string dialectogram_to_svg(const Dialectogram& d, const SvgOptions& options = {});

enum class ExportFormat { Json, Csv, Svg };
ExportFormat parse_export_format(const std::string& name);
void export_dialectogram(const Dialectogram& d, ExportFormat format,
                         const std::filesystem::path& path, const SvgOptions& options = {});
/// Loads a JSON or CSV export, chosen by file extension.
Dialectogram import_dialectogram(const std::filesystem::path& path);

std::string mean_offset_to_json(const MeanOffsetProjection& m);
std::string aggregate_to_csv(const AggregateScore& a);

}  // namespace dialectoscope
