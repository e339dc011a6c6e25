#include "dialectoscope/pipeline.hpp"

#include <algorithm>
#include <utility>

#include <json.hpp>

#include "dialectoscope/align.hpp"
#include "dialectoscope/dialectogram.hpp"
#include "dialectoscope/embedding.hpp"
#include "dialectoscope/error.hpp"
#include "dialectoscope/glove.hpp"
#include "dialectoscope/measures.hpp"
#include "dialectoscope/random.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace fs = std::filesystem;

namespace {

const char* const kStageNames[] = {"ingest", "vocab", "cooc", "train", "prepare", "align", "measures",
                                   "dialectograms"};

using Inputs = std::vector<std::pair<std::string, fs::path>>;

class Runner {
 public:
  Runner(const PipelineConfig& config, const LogFn& log)
      : config_(config), out_(config.output_dir), hash_(config_hash(config)), log_(log) {}

  fs::path at(const std::string& name) const { return out_ / name; }

  Inputs local(std::initializer_list<std::string> names) const {
    Inputs in;
    for (const auto& n : names) in.emplace_back(n, at(n));
    return in;
  }

  bool current(Stage stage, const Inputs& inputs, const std::vector<fs::path>& outputs) const {
    const auto expected = expected_inputs(inputs);
    for (const auto& o : outputs) {
      ArtifactMeta meta;
      if (!fs::exists(o) || !read_meta(o, meta)) return false;
      if (meta.stage != to_string(stage) || meta.config_hash != hash_ || meta.seed != config_.seed ||
          meta.version != toolkit_version() || meta.inputs != expected || meta.checksum != file_checksum(o))
        return false;
    }
    return true;
  }

  void seal(Stage stage, const Inputs& inputs, const std::vector<fs::path>& outputs) const {
    ArtifactMeta meta;
    meta.stage = to_string(stage);
    meta.config_hash = hash_;
    meta.seed = config_.seed;
    meta.version = toolkit_version();
    meta.inputs = expected_inputs(inputs);
    for (const auto& o : outputs) {
      meta.checksum = file_checksum(o);
      write_meta(o, meta);
    }
  }

  void log(const std::string& msg) const {
    if (log_) log_(msg);
  }

 private:
  std::map<std::string, std::string> expected_inputs(const Inputs& inputs) const {
    std::map<std::string, std::string> out;
    for (const auto& [name, path] : inputs) {
      if (!fs::exists(path)) throw IoError("missing input for stage: " + path.string());
      out[name] = file_checksum(path);
    }
    return out;
  }

  const PipelineConfig& config_;
  fs::path out_;
  std::string hash_;
  const LogFn& log_;
};

std::vector<std::string> dialectogram_files(const PipelineConfig& config) {
  std::vector<std::string> out;
  for (const auto& focal : config.focals)
    for (const auto& f : config.formats) out.push_back(std::string(artifact::kDialectograms) + "/" + focal + "." + f);
  return out;
}

std::pair<std::string, std::string> ec_sources(const PipelineConfig& config) {
  if (config.ec_source == EcSource::Raw) return {artifact::kRawCooc1, artifact::kRawCooc2};
  return {artifact::kCooc1, artifact::kCooc2};
}

std::vector<fs::path> stage_outputs(const PipelineConfig& config, Stage stage) {
  const fs::path out = config.output_dir;
  std::vector<fs::path> files;
  const auto add = [&](std::initializer_list<std::string> names) {
    for (const auto& n : names) files.push_back(out / n);
  };
  const std::string aligned = artifact::kAligned;
  switch (stage) {
    case Stage::Ingest: add({artifact::kCorpus1, artifact::kCorpus2}); break;
    case Stage::Vocab: add({artifact::kVocab}); break;
    case Stage::Cooc:
      add({artifact::kCooc1, artifact::kCooc2});
      if (config.ec_source == EcSource::Raw) add({artifact::kRawCooc1, artifact::kRawCooc2});
      break;
    case Stage::Train: add({artifact::kRaw1, artifact::kRaw2, artifact::kLoss1, artifact::kLoss2}); break;
    case Stage::Prepare: add({artifact::kPrepared1, artifact::kPrepared2}); break;
    case Stage::Align: add({aligned + ".first.txt", aligned + ".second.txt", aligned + ".json"}); break;
    case Stage::Measures: add({artifact::kMeasures, artifact::kRanking}); break;
    case Stage::Dialectograms:
      for (const auto& f : dialectogram_files(config)) files.push_back(out / f);
      add({artifact::kAggregate});
      break;
  }
  return files;
}

Inputs stage_inputs(const PipelineConfig& config, const Runner& r, Stage stage) {
  const std::string aligned = artifact::kAligned;
  const auto [ec1, ec2] = ec_sources(config);
  switch (stage) {
    case Stage::Ingest: return {{"corpus1", config.corpus1}, {"corpus2", config.corpus2}};
    case Stage::Vocab: return r.local({artifact::kCorpus1, artifact::kCorpus2});
    case Stage::Cooc: return r.local({artifact::kCorpus1, artifact::kCorpus2, artifact::kVocab});
    case Stage::Train: return r.local({artifact::kCooc1, artifact::kCooc2, artifact::kVocab});
    case Stage::Prepare: return r.local({artifact::kRaw1, artifact::kRaw2, artifact::kVocab});
    case Stage::Align: return r.local({artifact::kPrepared1, artifact::kPrepared2});
    case Stage::Measures:
      return r.local({aligned + ".first.txt", aligned + ".second.txt", aligned + ".json", artifact::kPrepared1,
                      artifact::kPrepared2, artifact::kVocab, ec1, ec2});
    case Stage::Dialectograms:
      return r.local({aligned + ".first.txt", aligned + ".second.txt", aligned + ".json", artifact::kVocab, ec1,
                      ec2, artifact::kMeasures});
  }
  return {};
}

void run_stage(const PipelineConfig& config, const Runner& r, Stage stage) {
  const bool gz = config.compress;
  switch (stage) {
    case Stage::Ingest: {
      for (int k = 1; k <= 2; ++k) {
        Corpus c = read_corpus(k == 1 ? config.corpus1 : config.corpus2, k);
        if (config.dedup) c = dedup_documents(c);
        r.log("  corpus" + std::to_string(k) + ": " + std::to_string(c.doc_count()) + " documents, " +
              std::to_string(c.token_count()) + " tokens");
        write_corpus(c, r.at(k == 1 ? artifact::kCorpus1 : artifact::kCorpus2), gz);
      }
      break;
    }
    case Stage::Vocab: {
      const Corpus c1 = read_corpus(r.at(artifact::kCorpus1), 1);
      const Corpus c2 = read_corpus(r.at(artifact::kCorpus2), 2);
      const Vocabulary vocab = build_vocabulary(c1, c2, config.min_count);
      r.log("  vocabulary: " + std::to_string(vocab.size()) + " words");
      write_vocabulary(vocab, r.at(artifact::kVocab), gz);
      break;
    }
    case Stage::Cooc: {
      const Vocabulary vocab = read_vocabulary(r.at(artifact::kVocab));
      for (int k = 1; k <= 2; ++k) {
        const Corpus c = read_corpus(r.at(k == 1 ? artifact::kCorpus1 : artifact::kCorpus2), k);
        write_cooc(count_cooccurrences(c, vocab, config.cooc), r.at(k == 1 ? artifact::kCooc1 : artifact::kCooc2),
                   gz);
        if (config.ec_source == EcSource::Raw) {
          CoocOptions raw = config.cooc;
          raw.distance_weighting = false;
          write_cooc(count_cooccurrences(c, vocab, raw), r.at(k == 1 ? artifact::kRawCooc1 : artifact::kRawCooc2),
                     gz);
        }
      }
      break;
    }
    case Stage::Train: {
      const Vocabulary vocab = read_vocabulary(r.at(artifact::kVocab));
      for (int k = 1; k <= 2; ++k) {
        const CoocMatrix cooc = read_cooc(r.at(k == 1 ? artifact::kCooc1 : artifact::kCooc2));
        GloveConfig glove = config.glove;
        glove.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
        const TrainResult result = train(cooc, glove);
        r.log("  corpus" + std::to_string(k) + ": loss " + format_real(result.loss_trace.front(), 6) + " -> " +
              format_real(result.loss_trace.back(), 6));
        write_embeddings(finalize_embedding(result.params, vocab.tokens(), false),
                         r.at(k == 1 ? artifact::kRaw1 : artifact::kRaw2), gz);
        write_loss_trace(result.loss_trace, r.at(k == 1 ? artifact::kLoss1 : artifact::kLoss2), gz);
      }
      break;
    }
    case Stage::Prepare: {
      const Vocabulary vocab = read_vocabulary(r.at(artifact::kVocab));
      for (int k = 1; k <= 2; ++k) {
        const EmbeddingSet raw = restrict_to(read_embeddings(r.at(k == 1 ? artifact::kRaw1 : artifact::kRaw2)), vocab);
        write_embeddings(prepare_for_alignment(raw, vocab.log_counts(k), config.prepare),
                         r.at(k == 1 ? artifact::kPrepared1 : artifact::kPrepared2), gz);
      }
      break;
    }
    case Stage::Align: {
      const EmbeddingSet e1 = read_embeddings(r.at(artifact::kPrepared1));
      const EmbeddingSet e2 = read_embeddings(r.at(artifact::kPrepared2));
      const AlignedPair pair = align(e1, e2, config.method);
      r.log("  " + to_string(config.method) + " residual " + format_real(pair.residual, 6));
      write_aligned_pair(pair, r.at(artifact::kAligned), gz);
      break;
    }
    case Stage::Measures: {
      const auto [ec1, ec2] = ec_sources(config);
      const AlignedPair pair = read_aligned_pair(r.at(artifact::kAligned));
      const Vocabulary vocab = read_vocabulary(r.at(artifact::kVocab));
      const MeasureTable table =
          compute_measures(pair, read_embeddings(r.at(artifact::kPrepared1)),
                           read_embeddings(r.at(artifact::kPrepared2)), vocab, read_cooc(r.at(ec1)),
                           read_cooc(r.at(ec2)), config.measures);
      if (!table.svm_converged) r.log("  warning: SVM objective plateaued above threshold");
      write_measure_table(table, r.at(artifact::kMeasures), gz);
      write_file(r.at(artifact::kRanking), serialize_ranking(table, config.rank_absolute), gz);
      break;
    }
    case Stage::Dialectograms: {
      const auto [ec1, ec2] = ec_sources(config);
      const AlignedPair pair = read_aligned_pair(r.at(artifact::kAligned));
      const Vocabulary vocab = read_vocabulary(r.at(artifact::kVocab));
      const CoocMatrix c1 = read_cooc(r.at(ec1));
      const CoocMatrix c2 = read_cooc(r.at(ec2));
      DialectogramOptions opts;
      opts.exclude_top = config.exclude_top;
      SvgOptions svg;
      svg.label_count = config.label_count;
      for (const auto& focal : config.focals) {
        const Dialectogram d = build_dialectogram(pair, vocab, c1, c2, require_token(vocab, focal), opts);
        for (const auto& f : config.formats) {
          export_dialectogram(d, parse_export_format(f),
                              r.at(std::string(artifact::kDialectograms) + "/" + focal + "." + f), svg);
        }
      }
      std::vector<std::size_t> focals;
      if (config.aggregate_top == 0) {
        for (std::size_t i = 0; i < vocab.size(); ++i) focals.push_back(i);
      } else {
        const MeasureTable table = read_measure_table(r.at(artifact::kMeasures));
        const auto ranked = rank_by_sense_separation(table, config.rank_absolute);
        for (std::size_t k = 0; k < ranked.size() && k < config.aggregate_top; ++k)
          focals.push_back(require_token(vocab, table.rows[ranked[k]].token));
      }
      const AggregateScore agg =
          aggregate_characteristic_use(pair, focals, config.threshold, config.measures.threads);
      write_file(r.at(artifact::kAggregate), aggregate_to_csv(agg), gz);
      break;
    }
  }
}

}  // namespace

std::string to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }

Stage parse_stage(const std::string& name) {
  for (Stage s : kAllStages)
    if (to_string(s) == name) return s;
  throw ConfigError("unknown stage '" + name +
                    "' (expected ingest, vocab, cooc, train, prepare, align, measures or dialectograms)");
}

std::string toolkit_version() { return DIALECTOSCOPE_VERSION; }

fs::path meta_path(const fs::path& artifact) {
  fs::path p = artifact;
  p += ".meta.json";
  return p;
}

void write_meta(const fs::path& artifact, const ArtifactMeta& meta) {
  nlohmann::ordered_json j;
  j["stage"] = meta.stage;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["version"] = meta.version;
  j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [name, sum] : meta.inputs) j["inputs"][name] = sum;
  j["checksum"] = meta.checksum;
  write_file(meta_path(artifact), j.dump(2) + "\n");
}

bool read_meta(const fs::path& artifact, ArtifactMeta& meta) {
  const fs::path p = meta_path(artifact);
  if (!fs::exists(p)) return false;
  try {
    const auto j = nlohmann::json::parse(read_file(p));
    meta.stage = j.at("stage").get<std::string>();
    meta.config_hash = j.at("config_hash").get<std::string>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.version = j.at("version").get<std::string>();
    meta.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    meta.checksum = j.at("checksum").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  return true;
}

std::size_t require_token(const Vocabulary& vocab, const std::string& token) {
  if (auto i = vocab.index_of(token)) return *i;
  std::string msg = "'" + token + "' is not in the vocabulary";
  const auto near = vocab.nearest_lexicographic(token);
  if (!near.empty()) {
    msg += "; nearest:";
    for (const auto& n : near) msg += " " + n;
  }
  throw DataError(msg);
}

std::string serialize_ranking(const MeasureTable& table, bool absolute) {
  std::string out = "rank,token,sense_separation,cosine_distance,freq1,freq2\n";
  std::size_t rank = 0;
  for (std::size_t i : rank_by_sense_separation(table, absolute)) {
    const auto& row = table.rows[i];
    out += std::to_string(++rank) + "," + csv_field(row.token) + "," + format_real(*row.sense_separation) + "," +
           format_real(row.cosine_distance) + "," + std::to_string(row.freq1) + "," + std::to_string(row.freq2) +
           "\n";
  }
  return out;
}

std::vector<StageReport> run_pipeline(const PipelineConfig& input, StageRange range, const LogFn& log) {
  PipelineConfig config = input;
  apply_globals(config);
  config.validate(range.from == Stage::Ingest);
  if (range.to < range.from) throw ConfigError("stage range ends before it starts");
  for (const auto& f : config.formats) parse_export_format(f);

  Runner runner(config, log);
  std::vector<StageReport> reports;
  for (Stage stage : kAllStages) {
    if (stage < range.from || stage > range.to) continue;
    const Inputs inputs = stage_inputs(config, runner, stage);
    const auto outputs = stage_outputs(config, stage);
    if (runner.current(stage, inputs, outputs)) {
      runner.log(to_string(stage) + ": up to date");
      reports.push_back({stage, true});
      continue;
    }
    runner.log(to_string(stage) + ": running");
    run_stage(config, runner, stage);
    runner.seal(stage, inputs, outputs);
    reports.push_back({stage, false});
  }
  return reports;
}

std::vector<fs::path> declared_artifacts(const PipelineConfig& config) {
  std::vector<fs::path> out;
  for (Stage s : kAllStages)
    for (auto& p : stage_outputs(config, s)) out.push_back(std::move(p));
  return out;
}

}  // namespace dialectoscope
