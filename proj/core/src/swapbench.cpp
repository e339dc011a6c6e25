#include "dialectoscope/swapbench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "dialectoscope/error.hpp"
#include "dialectoscope/random.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

struct Partner {
  std::string token;
  double degree;
};

std::unordered_map<std::string, Partner> partner_map(const SwapPlan& plan) {
  std::unordered_map<std::string, Partner> out;
  for (const auto& p : plan.pairs) {
    if (p.a == p.b) throw DataError("swap pair pairs '" + p.a + "' with itself");
    if (!out.emplace(p.a, Partner{p.b, p.degree}).second ||
        !out.emplace(p.b, Partner{p.a, p.degree}).second) {
      throw DataError("swap plan uses a word in more than one pair");
    }
  }
  return out;
}

std::optional<double> try_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return spearman_rho(x, y);
  } catch (const DataError&) {
    return std::nullopt;
  }
}

std::string csv_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

double ratio(std::size_t hit, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

PosMap read_pos_map(const std::filesystem::path& path) {
  LineReader reader(path);
  PosMap out;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 2 || f[0].empty() || f[1].empty()) {
      throw DataError(path.string() + ":" + std::to_string(reader.line_number()) +
                      ": expected token<TAB>tag");
    }
    out[std::string(f[0])] = std::string(f[1]);
  }
  return out;
}

double SwapPlan::degree_of(const std::string& token) const {
  for (const auto& p : pairs)
    if (p.a == token || p.b == token) return p.degree;
  return 0.0;
}

void SwapSampling::validate() const {
  if (deciles < 1) throw ConfigError("swapbench deciles must be >= 1");
  if (pairs_per_decile < 1) throw ConfigError("swapbench pairs_per_decile must be >= 1");
  if (degrees.empty()) throw ConfigError("swapbench needs at least one degree");
  for (double d : degrees)
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("swap degrees must lie in [0, 1]");
  const auto total = static_cast<std::size_t>(deciles) * static_cast<std::size_t>(pairs_per_decile);
  if (total % degrees.size() != 0) {
    throw ConfigError("the number of degrees (" + std::to_string(degrees.size()) +
                      ") must divide deciles * pairs_per_decile (" + std::to_string(total) + ")");
  }
}

std::vector<int> frequency_deciles(const Vocabulary& vocab, int corpus, int deciles) {
  if (deciles < 1) throw ConfigError("deciles must be >= 1");
  const std::size_t n = vocab.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto count = [&](std::size_t i) { return corpus == 1 ? vocab.count1(i) : vocab.count2(i); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (count(a) != count(b)) return count(a) > count(b);
    return vocab.token(a) < vocab.token(b);
  });
  std::vector<int> out(n);
  for (std::size_t rank = 0; rank < n; ++rank)
    out[order[rank]] = static_cast<int>(rank * static_cast<std::size_t>(deciles) / n);
  return out;
}

SwapPlan sample_swap_pairs(const Vocabulary& vocab, int corpus, const PosMap* pos_map,
                           const SwapSampling& sampling) {
  sampling.validate();
  const auto decile_of = frequency_deciles(vocab, corpus, sampling.deciles);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(sampling.deciles));
  for (std::size_t i = 0; i < vocab.size(); ++i)
    members[static_cast<std::size_t>(decile_of[i])].push_back(i);

  SwapPlan plan;
  plan.seed = sampling.seed;
  plan.deciles = sampling.deciles;
  plan.degrees = sampling.degrees;
  plan.pos_matched = pos_map != nullptr;
  if (pos_map != nullptr) {
    std::vector<std::pair<std::string, std::string>> entries(pos_map->begin(), pos_map->end());
    std::sort(entries.begin(), entries.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [tok, tag] : entries) h = fnv1a(tok + '\t' + tag + '\n', h);
    plan.pos_map_checksum = hex64(h);
  }

  Rng rng(sampling.seed);
  const auto ppd = static_cast<std::size_t>(sampling.pairs_per_decile);
  for (int d = 0; d < sampling.deciles; ++d) {
    auto pool = members[static_cast<std::size_t>(d)];
    rng.shuffle(std::span<std::size_t>(pool));
    std::unordered_map<std::string, std::size_t> waiting;  // tag -> unpaired word
    std::vector<std::pair<std::size_t, std::size_t>> drawn;
    for (std::size_t w : pool) {
      if (drawn.size() == ppd) break;
      std::string tag;
      if (pos_map != nullptr) {
        auto it = pos_map->find(vocab.token(w));
        if (it == pos_map->end()) continue;
        tag = it->second;
      }
      auto it = waiting.find(tag);
      if (it == waiting.end()) {
        waiting.emplace(tag, w);
      } else {
        drawn.emplace_back(it->second, w);
        waiting.erase(it);
      }
    }
    if (drawn.size() < ppd) {
      throw DataError("swapbench: decile " + std::to_string(d) + " (" +
                      std::to_string(members[static_cast<std::size_t>(d)].size()) +
                      " words) yields only " + std::to_string(drawn.size()) + " of " +
                      std::to_string(ppd) + " required pairs" +
                      (pos_map != nullptr ? " with matching part-of-speech tags" : ""));
    }
    for (std::size_t k = 0; k < ppd; ++k) {
      const std::size_t slot = (static_cast<std::size_t>(d) * ppd + k) % sampling.degrees.size();
      plan.pairs.push_back({vocab.token(drawn[k].first), vocab.token(drawn[k].second),
                            sampling.degrees[slot], d});
    }
  }
  return plan;
}

Corpus apply_swaps(const Corpus& corpus, const SwapPlan& plan, std::uint64_t seed) {
  const auto partners = partner_map(plan);
  Corpus out = corpus;
  Rng rng(seed);
  for (auto& doc : out.documents) {
    for (auto& tok : doc) {
      auto it = partners.find(tok);
      if (it == partners.end()) continue;
      if (rng.uniform() < it->second.degree) tok = it->second.token;
    }
  }
  return out;
}

std::string swap_plan_to_json(const SwapPlan& plan) {
  nlohmann::ordered_json j;
  j["seed"] = plan.seed;
  j["deciles"] = plan.deciles;
  j["degrees"] = plan.degrees;
  j["pos_matched"] = plan.pos_matched;
  j["pos_map_checksum"] = plan.pos_map_checksum;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : plan.pairs)
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"degree", p.degree}, {"decile", p.decile}});
  j["pairs"] = std::move(pairs);
  return j.dump(2) + "\n";
}

SwapPlan swap_plan_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SwapPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.deciles = j.at("deciles").get<int>();
    plan.degrees = j.at("degrees").get<std::vector<double>>();
    plan.pos_matched = j.value("pos_matched", false);
    plan.pos_map_checksum = j.value("pos_map_checksum", std::string());
    for (const auto& p : j.at("pairs")) {
      plan.pairs.push_back({p.at("a").get<std::string>(), p.at("b").get<std::string>(),
                            p.at("degree").get<double>(), p.at("decile").get<int>()});
    }
    partner_map(plan);
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed swap plan JSON: ") + e.what());
  }
}

const MeasureCorrelation& EvalReport::measure(const std::string& name) const {
  for (const auto& c : correlations)
    if (c.measure == name) return c;
  throw DataError("report has no measure '" + name + "'");
}

std::vector<MeasureCorrelation> evaluate_measures(const MeasureTable& table, const SwapPlan& plan) {
  const auto partners = partner_map(plan);
  std::vector<double> degree(table.rows.size(), 0.0);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto it = partners.find(table.rows[i].token);
    if (it != partners.end()) degree[i] = it->second.degree;
  }
  using Getter = std::optional<double> (*)(const MeasureRow&);
  const std::pair<const char*, Getter> measures[] = {
      {"cosine_distance", [](const MeasureRow& r) { return std::optional(r.cosine_distance); }},
      {"knn_overlap", [](const MeasureRow& r) { return std::optional(r.knn_overlap); }},
      {"offset_pca", [](const MeasureRow& r) { return std::optional(r.offset_pca); }},
      {"svm_distance", [](const MeasureRow& r) { return std::optional(r.svm_distance); }},
      {"sense_separation", [](const MeasureRow& r) { return r.sense_separation; }},
  };
  std::vector<MeasureCorrelation> out;
  for (const auto& [name, get] : measures) {
    std::vector<double> value, deg, logf, value_sw, deg_sw;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto v = get(table.rows[i]);
      if (!v) continue;
      value.push_back(*v);
      deg.push_back(degree[i]);
      logf.push_back(table.rows[i].log_mean_frequency());
      if (degree[i] > 0.0) {
        value_sw.push_back(*v);
        deg_sw.push_back(degree[i]);
      }
    }
    MeasureCorrelation c;
    c.measure = name;
    c.n_all = value.size();
    c.n_swapped = value_sw.size();
    c.spearman_all = try_spearman(value, deg);
    c.spearman_swapped = try_spearman(value_sw, deg_sw);
    c.spearman_frequency = try_spearman(value, logf);
    out.push_back(std::move(c));
  }
  return out;
}

TranslationAccuracy translation_accuracy(const std::vector<std::size_t>& forward,
                                         const std::vector<std::size_t>& backward,
                                         const std::vector<std::string>& tokens,
                                         const SwapPlan& plan) {
  const auto partners = partner_map(plan);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < tokens.size(); ++i) index.emplace(tokens[i], i);
  std::size_t hit_un = 0, hit_below = 0, hit_above = 0, hit_half = 0;
  TranslationAccuracy acc;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool self = forward[i] == i && backward[i] == i;
    auto it = partners.find(tokens[i]);
    const double degree = it == partners.end() ? 0.0 : it->second.degree;
    if (degree == 0.0) {
      ++acc.n_unswapped;
      hit_un += self;
    } else if (degree < 0.5) {
      ++acc.n_below_half;
      hit_below += self;
    } else if (degree == 0.5) {
      ++acc.n_half;
      hit_half += self;
    } else {
      auto p = index.find(it->second.token);
      if (p == index.end()) continue;
      ++acc.n_above_half;
      hit_above += forward[i] == p->second && backward[i] == p->second;
    }
  }
  acc.unswapped = ratio(hit_un, acc.n_unswapped);
  acc.below_half = ratio(hit_below, acc.n_below_half);
  acc.above_half = ratio(hit_above, acc.n_above_half);
  acc.half_self_rate = ratio(hit_half, acc.n_half);
  return acc;
}

TranslationAccuracy translation_accuracy(const AlignedPair& pair, const SwapPlan& plan,
                                         int threads) {
  return translation_accuracy(translate_all(pair, Direction::FirstToSecond, threads),
                              translate_all(pair, Direction::SecondToFirst, threads),
                              pair.first.tokens, plan);
}

std::string eval_report_to_json(const EvalReport& report) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["pos_matched"] = report.pos_matched;
  j["decile_rule"] = report.decile_rule;
  j["vocabulary_size"] = report.vocabulary_size;
  j["swapped_words"] = report.swapped_words;
  auto corr = nlohmann::ordered_json::array();
  for (const auto& c : report.correlations) {
    nlohmann::ordered_json m;
    m["measure"] = c.measure;
    m["spearman_all"] = opt(c.spearman_all);
    m["spearman_swapped"] = opt(c.spearman_swapped);
    m["spearman_frequency"] = opt(c.spearman_frequency);
    m["n_all"] = c.n_all;
    m["n_swapped"] = c.n_swapped;
    corr.push_back(std::move(m));
  }
  j["correlations"] = std::move(corr);
  const auto& t = report.translation;
  j["translation"] = {{"unswapped", t.unswapped},       {"below_half", t.below_half},
                      {"above_half", t.above_half},     {"half_self_rate", t.half_self_rate},
                      {"n_unswapped", t.n_unswapped},   {"n_below_half", t.n_below_half},
                      {"n_above_half", t.n_above_half}, {"n_half", t.n_half}};
  return j.dump(2) + "\n";
}

std::string eval_correlations_to_csv(const EvalReport& report) {
  std::string out = "table";
  for (const auto& c : report.correlations) out += "," + c.measure;
  out += '\n';
  const std::pair<const char*, std::optional<double> MeasureCorrelation::*> rows[] = {
      {"all_words", &MeasureCorrelation::spearman_all},
      {"swapped_only", &MeasureCorrelation::spearman_swapped},
      {"log_frequency", &MeasureCorrelation::spearman_frequency},
  };
  for (const auto& [name, field] : rows) {
    out += name;
    for (const auto& c : report.correlations) out += "," + csv_optional(c.*field);
    out += '\n';
  }
  return out;
}

std::string eval_translation_to_csv(const EvalReport& report) {
  const auto& t = report.translation;
  std::string out =
      "unswapped,below_half,above_half,half_self_rate,n_unswapped,n_below_half,n_above_half,"
      "n_half\n";
  out += format_real(t.unswapped) + ',' + format_real(t.below_half) + ',' +
         format_real(t.above_half) + ',' + format_real(t.half_self_rate) + ',' +
         std::to_string(t.n_unswapped) + ',' + std::to_string(t.n_below_half) + ',' +
         std::to_string(t.n_above_half) + ',' + std::to_string(t.n_half) + '\n';
  return out;
}

SwapbenchResult run_swapbench(const Corpus& original, const SwapbenchConfig& config,
                              const PosMap* pos_map,
                              const std::function<void(const std::string&)>& progress) {
  const auto note = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  SwapbenchResult result;
  const Vocabulary base = build_vocabulary(original, original, config.min_count);
  SwapSampling sampling = config.sampling;
  sampling.seed = derive_seed(config.seed, 1);
  result.plan = sample_swap_pairs(base, 1, pos_map, sampling);
  const Corpus swapped = apply_swaps(original, result.plan, derive_seed(config.seed, 2));
  note("plan: " + std::to_string(result.plan.pairs.size()) + " pairs");

  result.vocab = build_vocabulary(original, swapped, config.min_count);
  const auto& vocab = result.vocab;
  const CoocMatrix cooc1 = count_cooccurrences(original, vocab, config.cooc);
  const CoocMatrix cooc2 = count_cooccurrences(swapped, vocab, config.cooc);
  note("vocabulary " + std::to_string(vocab.size()) + ", co-occurrence cells " +
       std::to_string(cooc1.nnz()) + " / " + std::to_string(cooc2.nnz()));

  GloveConfig g1 = config.glove;
  GloveConfig g2 = config.glove;
  g1.seed = derive_seed(config.seed, 3);
  g2.seed = derive_seed(config.seed, 4);
  const auto t1 = train(cooc1, g1);
  note("trained original: mean loss " + format_real(t1.loss_trace.front(), 4) + " -> " +
       format_real(t1.loss_trace.back(), 4));
  const auto t2 = train(cooc2, g2);
  note("trained swapped: mean loss " + format_real(t2.loss_trace.front(), 4) + " -> " +
       format_real(t2.loss_trace.back(), 4));

  const auto e1 = prepare_for_alignment(finalize_embedding(t1.params, vocab.tokens(), false),
                                        vocab.log_counts(1), config.prepare);
  const auto e2 = prepare_for_alignment(finalize_embedding(t2.params, vocab.tokens(), false),
                                        vocab.log_counts(2), config.prepare);
  const AlignedPair pair = align(e1, e2, config.method);
  result.table = compute_measures(pair, e1, e2, vocab, cooc1, cooc2, config.measures);

  result.report.correlations = evaluate_measures(result.table, result.plan);
  result.report.translation = translation_accuracy(pair, result.plan, config.measures.threads);
  result.report.pos_matched = result.plan.pos_matched;
  result.report.vocabulary_size = vocab.size();
  const auto partners = partner_map(result.plan);
  for (const auto& tok : vocab.tokens()) {
    auto it = partners.find(tok);
    if (it != partners.end() && it->second.degree > 0.0) ++result.report.swapped_words;
  }
  note("evaluation done");
  return result;
}

}  // namespace dialectoscope
