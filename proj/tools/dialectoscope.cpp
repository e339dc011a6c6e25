// dialectoscope: command line front end for the toolkit.
//
// Every subcommand runs standalone on files. With --config, inputs default to
// the artifacts in the configured output directory and settings default to
// the config values; explicit flags win.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dialectoscope/align.hpp"
#include "dialectoscope/config.hpp"
#include "dialectoscope/corpus.hpp"
#include "dialectoscope/dialectogram.hpp"
#include "dialectoscope/embedding.hpp"
#include "dialectoscope/error.hpp"
#include "dialectoscope/glove.hpp"
#include "dialectoscope/measures.hpp"
#include "dialectoscope/pipeline.hpp"
#include "dialectoscope/random.hpp"
#include "dialectoscope/swapbench.hpp"
#include "dialectoscope/textio.hpp"

namespace fs = std::filesystem;
using namespace dialectoscope;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string config_path;
  bool compress = false;
  bool quiet = false;
};

void say(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

PipelineConfig load(const Globals& g) {
  PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  if (g.compress) cfg.compress = true;
  apply_globals(cfg);
  return cfg;
}

// Explicit path, else the pipeline artifact when a config is in use.
fs::path input(const Globals& g, const PipelineConfig& cfg, const std::string& given, const std::string& artifact,
               const std::string& flag) {
  if (!given.empty()) return given;
  if (!g.config_path.empty()) return cfg.output_dir / artifact;
  throw ConfigError(flag + " is required (or pass --config)");
}

template <class T>
void override_with(T& target, const std::optional<T>& value) {
  if (value) target = *value;
}

std::vector<std::string> word_list(const std::vector<std::string>& args) {
  if (args.size() == 1 && fs::is_regular_file(args[0])) {
    const Corpus c = read_corpus(args[0]);
    std::vector<std::string> out;
    for (const auto& doc : c.documents) out.insert(out.end(), doc.begin(), doc.end());
    return out;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compare how two communities use the same words"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Global random seed");
  app.add_option("--threads", g.threads, "Worker threads (1 = fully deterministic)")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config_path, "Pipeline config file (INI)");
  app.add_flag("--compress", g.compress, "Gzip written artifacts");
  app.add_flag("-q,--quiet", g.quiet, "No progress output");

  // vocab
  auto* vocab_cmd = app.add_subcommand("vocab", "Build the shared vocabulary of two corpora");
  std::string v_c1, v_c2, v_out;
  std::optional<std::uint64_t> v_min;
  bool v_no_dedup = false;
  vocab_cmd->add_option("--corpus1", v_c1, "First corpus");
  vocab_cmd->add_option("--corpus2", v_c2, "Second corpus");
  vocab_cmd->add_option("--min-count", v_min, "Minimum count in each corpus");
  vocab_cmd->add_flag("--no-dedup", v_no_dedup, "Keep duplicate documents");
  vocab_cmd->add_option("-o,--output", v_out, "Vocabulary file");

  // cooc
  auto* cooc_cmd = app.add_subcommand("cooc", "Count windowed co-occurrences");
  std::string co_corpus, co_vocab, co_out;
  std::optional<int> co_window;
  bool co_flat = false;
  cooc_cmd->add_option("--corpus", co_corpus, "Tokenized corpus")->required();
  cooc_cmd->add_option("--vocab", co_vocab, "Vocabulary file");
  cooc_cmd->add_option("--window", co_window, "Symmetric window size");
  cooc_cmd->add_flag("--unweighted", co_flat, "Count 1 per pair instead of 1/distance");
  cooc_cmd->add_option("-o,--output", co_out, "Co-occurrence file")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train GloVe vectors on a co-occurrence file");
  std::string t_cooc, t_vocab, t_out, t_loss, t_weighting;
  std::optional<int> t_dim, t_epochs;
  std::optional<double> t_xmax, t_alpha, t_lr;
  train_cmd->add_option("--cooc", t_cooc, "Co-occurrence file")->required();
  train_cmd->add_option("--vocab", t_vocab, "Vocabulary file");
  train_cmd->add_option("--dim", t_dim, "Vector dimension");
  train_cmd->add_option("--epochs", t_epochs, "Training epochs");
  train_cmd->add_option("--x-max", t_xmax, "Weighting cutoff");
  train_cmd->add_option("--alpha", t_alpha, "Weighting exponent");
  train_cmd->add_option("--learning-rate", t_lr, "AdaGrad learning rate");
  train_cmd->add_option("--weighting", t_weighting, "default, uniform or inverted");
  train_cmd->add_option("-o,--output", t_out, "Embedding file")->required();
  train_cmd->add_option("--loss", t_loss, "Loss trace CSV");

  // align
  auto* align_cmd = app.add_subcommand("align", "Adjust, normalize and align two embedding files");
  std::string a_first, a_second, a_vocab, a_out, a_method;
  bool a_prepared = false, a_no_adjust = false;
  align_cmd->add_option("--first", a_first, "Embeddings of corpus 1");
  align_cmd->add_option("--second", a_second, "Embeddings of corpus 2");
  align_cmd->add_option("--vocab", a_vocab, "Vocabulary file");
  align_cmd->add_option("--method", a_method, "procrustes, cca or least_squares");
  align_cmd->add_flag("--prepared", a_prepared, "Inputs are already adjusted and normalized");
  align_cmd->add_flag("--no-frequency-adjust", a_no_adjust, "Skip frequency direction removal");
  align_cmd->add_option("-o,--output", a_out, "Output prefix");

  // measure
  auto* measure_cmd = app.add_subcommand("measure", "Compute per-word difference measures");
  std::string m_aligned, m_vocab, m_c1, m_c2, m_out, m_ranking;
  std::optional<std::size_t> m_k;
  std::optional<double> m_lambda;
  measure_cmd->add_option("--aligned", m_aligned, "Aligned pair prefix");
  measure_cmd->add_option("--vocab", m_vocab, "Vocabulary file");
  measure_cmd->add_option("--cooc1", m_c1, "Co-occurrences of corpus 1");
  measure_cmd->add_option("--cooc2", m_c2, "Co-occurrences of corpus 2");
  measure_cmd->add_option("--knn-k", m_k, "Neighbourhood size");
  measure_cmd->add_option("--svm-lambda", m_lambda, "SVM regularization");
  measure_cmd->add_option("-o,--output", m_out, "Measure table CSV");
  measure_cmd->add_option("--ranking", m_ranking, "Sense separation ranking CSV");

  // dialectogram
  auto* dg_cmd = app.add_subcommand("dialectogram", "Project one or more focal words' offsets");
  std::vector<std::string> dg_focals, dg_formats;
  std::string dg_aligned, dg_vocab, dg_c1, dg_c2, dg_dir;
  std::optional<std::size_t> dg_exclude, dg_labels;
  dg_cmd->add_option("focal", dg_focals, "Focal words")->required();
  dg_cmd->add_option("--aligned", dg_aligned, "Aligned pair prefix");
  dg_cmd->add_option("--vocab", dg_vocab, "Vocabulary file");
  dg_cmd->add_option("--cooc1", dg_c1, "Co-occurrences of corpus 1");
  dg_cmd->add_option("--cooc2", dg_c2, "Co-occurrences of corpus 2");
  dg_cmd->add_option("--format", dg_formats, "json, csv, svg")->delimiter(',');
  dg_cmd->add_option("--exclude-top", dg_exclude, "Drop this many most frequent words");
  dg_cmd->add_option("--labels", dg_labels, "Labelled points in the SVG");
  dg_cmd->add_option("--out-dir", dg_dir, "Output directory");

  // meanoffset
  auto* mo_cmd = app.add_subcommand("meanoffset", "Project the vocabulary on a word set's mean offset");
  std::vector<std::string> mo_words;
  std::string mo_aligned, mo_vocab, mo_out;
  std::size_t mo_top = 20;
  mo_cmd->add_option("words", mo_words, "Words, or one file of whitespace-separated words")->required();
  mo_cmd->add_option("--aligned", mo_aligned, "Aligned pair prefix");
  mo_cmd->add_option("--vocab", mo_vocab, "Vocabulary file");
  mo_cmd->add_option("--top", mo_top, "Extreme words listed per side");
  mo_cmd->add_option("-o,--output", mo_out, "JSON output (stdout when omitted)");

  // aggregate
  auto* agg_cmd = app.add_subcommand("aggregate", "Count characteristic use over many focal words");
  std::string ag_aligned, ag_vocab, ag_measures, ag_out;
  std::optional<double> ag_threshold;
  std::optional<std::size_t> ag_top;
  agg_cmd->add_option("--aligned", ag_aligned, "Aligned pair prefix");
  agg_cmd->add_option("--vocab", ag_vocab, "Vocabulary file");
  agg_cmd->add_option("--threshold", ag_threshold, "Projection threshold");
  agg_cmd->add_option("--top", ag_top, "Use the top-N words by sense separation (0 = all)");
  agg_cmd->add_option("--measures", ag_measures, "Measure table (needed with --top)");
  agg_cmd->add_option("-o,--output", ag_out, "Ranking CSV (stdout when omitted)");

  // swapbench
  auto* sb_cmd = app.add_subcommand("swapbench", "Synthetic word-swap validation");
  std::string sb_corpus, sb_pos, sb_dir;
  std::optional<int> sb_deciles, sb_ppd, sb_dim, sb_epochs, sb_window;
  std::optional<std::uint64_t> sb_min;
  sb_cmd->add_option("--corpus", sb_corpus, "Source corpus");
  sb_cmd->add_option("--pos-map", sb_pos, "token<TAB>tag file for tag-matched pairs");
  sb_cmd->add_option("--deciles", sb_deciles, "Frequency bins");
  sb_cmd->add_option("--pairs-per-decile", sb_ppd, "Pairs drawn per bin");
  sb_cmd->add_option("--min-count", sb_min, "Vocabulary threshold");
  sb_cmd->add_option("--dim", sb_dim, "Vector dimension");
  sb_cmd->add_option("--epochs", sb_epochs, "Training epochs");
  sb_cmd->add_option("--window", sb_window, "Co-occurrence window");
  sb_cmd->add_option("--out-dir", sb_dir, "Output directory")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the configured pipeline");
  std::string r_from = "ingest", r_to = "dialectograms";
  run_cmd->add_option("--from", r_from, "First stage");
  run_cmd->add_option("--to", r_to, "Last stage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    PipelineConfig cfg = load(g);
    const bool gz = cfg.compress;
    const auto need = [&](const std::string& given, const std::string& artifact, const std::string& flag) {
      return input(g, cfg, given, artifact, flag);
    };
    const auto load_vocab = [&](const std::string& given) {
      return read_vocabulary(need(given, artifact::kVocab, "--vocab"));
    };
    const auto ec_default = [&](int k) {
      if (cfg.ec_source == EcSource::Raw) return std::string(k == 1 ? artifact::kRawCooc1 : artifact::kRawCooc2);
      return std::string(k == 1 ? artifact::kCooc1 : artifact::kCooc2);
    };

    if (*vocab_cmd) {
      override_with(cfg.min_count, v_min);
      if (v_no_dedup) cfg.dedup = false;
      const fs::path p1 = v_c1.empty() ? cfg.corpus1 : fs::path(v_c1);
      const fs::path p2 = v_c2.empty() ? cfg.corpus2 : fs::path(v_c2);
      for (const auto& [p, flag] : {std::pair{p1, "--corpus1"}, std::pair{p2, "--corpus2"}}) {
        if (p.empty()) throw ConfigError(std::string(flag) + " is required (or pass --config)");
        if (!fs::exists(p)) throw ConfigError("corpus file not found: " + p.string());
      }
      Corpus c1 = read_corpus(p1, 1);
      Corpus c2 = read_corpus(p2, 2);
      if (cfg.dedup) {
        c1 = dedup_documents(c1);
        c2 = dedup_documents(c2);
      }
      const Vocabulary vocab = build_vocabulary(c1, c2, cfg.min_count);
      write_vocabulary(vocab, need(v_out, artifact::kVocab, "--output"), gz);
      say(g, "vocabulary: " + std::to_string(vocab.size()) + " words");
    } else if (*cooc_cmd) {
      override_with(cfg.cooc.window, co_window);
      if (co_flat) cfg.cooc.distance_weighting = false;
      const CoocMatrix m = count_cooccurrences(read_corpus(co_corpus), load_vocab(co_vocab), cfg.cooc);
      write_cooc(m, co_out, gz);
      say(g, "cells: " + std::to_string(m.nnz()));
    } else if (*train_cmd) {
      override_with(cfg.glove.dim, t_dim);
      override_with(cfg.glove.epochs, t_epochs);
      override_with(cfg.glove.x_max, t_xmax);
      override_with(cfg.glove.alpha, t_alpha);
      override_with(cfg.glove.learning_rate, t_lr);
      if (!t_weighting.empty()) cfg.glove.weighting = parse_weighting(t_weighting);
      const Vocabulary vocab = load_vocab(t_vocab);
      const TrainResult result = train(read_cooc(t_cooc), cfg.glove);
      write_embeddings(finalize_embedding(result.params, vocab.tokens(), false), t_out, gz);
      if (!t_loss.empty()) write_loss_trace(result.loss_trace, t_loss, gz);
      say(g, "mean loss " + format_real(result.loss_trace.front(), 6) + " -> " +
                 format_real(result.loss_trace.back(), 6));
    } else if (*align_cmd) {
      if (!a_method.empty()) cfg.method = parse_align_method(a_method);
      if (a_no_adjust) cfg.prepare.frequency_adjust = false;
      const Vocabulary vocab = load_vocab(a_vocab);
      EmbeddingSet e1 = restrict_to(read_embeddings(need(a_first, artifact::kRaw1, "--first")), vocab);
      EmbeddingSet e2 = restrict_to(read_embeddings(need(a_second, artifact::kRaw2, "--second")), vocab);
      if (!a_prepared) {
        e1 = prepare_for_alignment(e1, vocab.log_counts(1), cfg.prepare);
        e2 = prepare_for_alignment(e2, vocab.log_counts(2), cfg.prepare);
      }
      const AlignedPair pair = align(e1, e2, cfg.method);
      write_aligned_pair(pair, need(a_out, artifact::kAligned, "--output"), gz);
      say(g, to_string(cfg.method) + " residual " + format_real(pair.residual, 6));
    } else if (*measure_cmd) {
      override_with(cfg.measures.knn_k, m_k);
      override_with(cfg.measures.svm.lambda, m_lambda);
      const AlignedPair pair = read_aligned_pair(need(m_aligned, artifact::kAligned, "--aligned"));
      const Vocabulary vocab = load_vocab(m_vocab);
      // Neighbourhoods are rotation invariant, so the aligned vectors serve as
      // the unaligned spaces here.
      const MeasureTable table =
          compute_measures(pair, pair.first, pair.second, vocab, read_cooc(need(m_c1, ec_default(1), "--cooc1")),
                           read_cooc(need(m_c2, ec_default(2), "--cooc2")), cfg.measures);
      write_measure_table(table, need(m_out, artifact::kMeasures, "--output"), gz);
      if (!m_ranking.empty()) write_file(m_ranking, serialize_ranking(table, cfg.rank_absolute), gz);
      if (!table.svm_converged) say(g, "warning: SVM objective plateaued above threshold");
    } else if (*dg_cmd) {
      override_with(cfg.exclude_top, dg_exclude);
      override_with(cfg.label_count, dg_labels);
      if (!dg_formats.empty()) cfg.formats = dg_formats;
      const fs::path dir = dg_dir.empty() ? need("", artifact::kDialectograms, "--out-dir") : fs::path(dg_dir);
      const AlignedPair pair = read_aligned_pair(need(dg_aligned, artifact::kAligned, "--aligned"));
      const Vocabulary vocab = load_vocab(dg_vocab);
      std::vector<std::size_t> focals;
      for (const auto& f : dg_focals) focals.push_back(require_token(vocab, f));
      const CoocMatrix c1 = read_cooc(need(dg_c1, ec_default(1), "--cooc1"));
      const CoocMatrix c2 = read_cooc(need(dg_c2, ec_default(2), "--cooc2"));
      DialectogramOptions opts;
      opts.exclude_top = cfg.exclude_top;
      SvgOptions svg;
      svg.label_count = cfg.label_count;
      for (std::size_t k = 0; k < focals.size(); ++k) {
        const Dialectogram d = build_dialectogram(pair, vocab, c1, c2, focals[k], opts);
        for (const auto& f : cfg.formats) {
          const fs::path path = dir / (dg_focals[k] + "." + f);
          export_dialectogram(d, parse_export_format(f), path, svg);
          say(g, "wrote " + path.string());
        }
      }
    } else if (*mo_cmd) {
      const AlignedPair pair = read_aligned_pair(need(mo_aligned, artifact::kAligned, "--aligned"));
      const Vocabulary vocab = load_vocab(mo_vocab);
      std::vector<std::size_t> members;
      for (const auto& w : word_list(mo_words)) members.push_back(require_token(vocab, w));
      const std::string json = mean_offset_to_json(mean_offset_projection(pair, members, mo_top));
      if (mo_out.empty()) std::cout << json;
      else write_file(mo_out, json, gz);
    } else if (*agg_cmd) {
      override_with(cfg.threshold, ag_threshold);
      override_with(cfg.aggregate_top, ag_top);
      const AlignedPair pair = read_aligned_pair(need(ag_aligned, artifact::kAligned, "--aligned"));
      const Vocabulary vocab = load_vocab(ag_vocab);
      std::vector<std::size_t> focals;
      if (cfg.aggregate_top == 0) {
        for (std::size_t i = 0; i < vocab.size(); ++i) focals.push_back(i);
      } else {
        const MeasureTable table = read_measure_table(need(ag_measures, artifact::kMeasures, "--measures"));
        const auto ranked = rank_by_sense_separation(table, cfg.rank_absolute);
        for (std::size_t k = 0; k < ranked.size() && k < cfg.aggregate_top; ++k)
          focals.push_back(require_token(vocab, table.rows[ranked[k]].token));
      }
      const std::string csv =
          aggregate_to_csv(aggregate_characteristic_use(pair, focals, cfg.threshold, cfg.threads));
      if (ag_out.empty()) std::cout << csv;
      else write_file(ag_out, csv, gz);
    } else if (*sb_cmd) {
      SwapbenchConfig sc;
      sc.sampling = cfg.sampling;
      override_with(sc.sampling.deciles, sb_deciles);
      override_with(sc.sampling.pairs_per_decile, sb_ppd);
      sc.min_count = cfg.swap_min_count;
      override_with(sc.min_count, sb_min);
      sc.cooc = cfg.cooc;
      override_with(sc.cooc.window, sb_window);
      sc.glove = cfg.glove;
      override_with(sc.glove.dim, sb_dim);
      override_with(sc.glove.epochs, sb_epochs);
      sc.prepare = cfg.prepare;
      sc.method = cfg.method;
      sc.measures = cfg.measures;
      sc.seed = cfg.seed;
      const fs::path corpus_path = sb_corpus.empty() ? cfg.swap_corpus : fs::path(sb_corpus);
      if (corpus_path.empty()) throw ConfigError("--corpus is required (or swapbench.corpus in the config)");
      if (!fs::exists(corpus_path)) throw ConfigError("corpus file not found: " + corpus_path.string());
      const fs::path pos_path = sb_pos.empty() ? cfg.pos_map : fs::path(sb_pos);
      std::optional<PosMap> pos;
      if (!pos_path.empty()) pos = read_pos_map(pos_path);
      const SwapbenchResult r = run_swapbench(read_corpus(corpus_path), sc, pos ? &*pos : nullptr,
                                              [&](const std::string& m) { say(g, m); });
      const fs::path dir = sb_dir;
      write_file(dir / "plan.json", swap_plan_to_json(r.plan));
      write_file(dir / "report.json", eval_report_to_json(r.report));
      write_file(dir / "correlations.csv", eval_correlations_to_csv(r.report));
      write_file(dir / "translation.csv", eval_translation_to_csv(r.report));
      write_measure_table(r.table, dir / "measures.csv", gz);
      say(g, "wrote " + dir.string());
    } else if (*run_cmd) {
      if (g.config_path.empty()) throw ConfigError("run needs --config");
      const auto reports = run_pipeline(cfg, {parse_stage(r_from), parse_stage(r_to)},
                                        [&](const std::string& m) { say(g, m); });
      std::size_t ran = 0;
      for (const auto& rep : reports) ran += rep.skipped ? 0 : 1;
      say(g, std::to_string(ran) + " of " + std::to_string(reports.size()) + " stages ran");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
