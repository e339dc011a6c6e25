#include "dialectoscope/config.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dialectoscope/dialectogram.hpp"
#include "dialectoscope/error.hpp"
#include "dialectoscope/random.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

namespace fs = std::filesystem;

struct Context {
  PipelineConfig& config;
  const fs::path& base;
};

struct Field {
  const char* key;
  std::function<void(Context&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw ConfigError("config key '" + key + "': '" + value + "' is not " + want);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad_value(key, v, "a boolean");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    const long long x = parse_integer(v);
    if (x < 0) bad_value(key, v, "a non-negative integer");
    return static_cast<std::uint64_t>(x);
  } catch (const DataError&) {
    bad_value(key, v, "an integer");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    return static_cast<int>(parse_integer(v));
  } catch (const DataError&) {
    bad_value(key, v, "an integer");
  }
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return parse_real(v);
  } catch (const DataError&) {
    bad_value(key, v, "a number");
  }
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ' ' || c == ',' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? " " : "") + items[i];
  return out;
}

fs::path resolve(const fs::path& base, const std::string& v) {
  if (v.empty()) return {};
  const fs::path p(v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string b(bool v) { return v ? "true" : "false"; }
std::string r(double v) { return format_real(v); }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"corpus.corpus1", [](Context& c, const std::string& v) { c.config.corpus1 = resolve(c.base, v); },
       [](const PipelineConfig& p) { return p.corpus1.string(); }},
      {"corpus.corpus2", [](Context& c, const std::string& v) { c.config.corpus2 = resolve(c.base, v); },
       [](const PipelineConfig& p) { return p.corpus2.string(); }},
      {"corpus.dedup", [](Context& c, const std::string& v) { c.config.dedup = to_bool("corpus.dedup", v); },
       [](const PipelineConfig& p) { return b(p.dedup); }},
      {"corpus.min_count",
       [](Context& c, const std::string& v) { c.config.min_count = to_uint("corpus.min_count", v); },
       [](const PipelineConfig& p) { return std::to_string(p.min_count); }},
      {"corpus.window", [](Context& c, const std::string& v) { c.config.cooc.window = to_int("corpus.window", v); },
       [](const PipelineConfig& p) { return std::to_string(p.cooc.window); }},
      {"corpus.distance_weighting",
       [](Context& c, const std::string& v) {
         c.config.cooc.distance_weighting = to_bool("corpus.distance_weighting", v);
       },
       [](const PipelineConfig& p) { return b(p.cooc.distance_weighting); }},

      {"glove.dim", [](Context& c, const std::string& v) { c.config.glove.dim = to_int("glove.dim", v); },
       [](const PipelineConfig& p) { return std::to_string(p.glove.dim); }},
      {"glove.epochs", [](Context& c, const std::string& v) { c.config.glove.epochs = to_int("glove.epochs", v); },
       [](const PipelineConfig& p) { return std::to_string(p.glove.epochs); }},
      {"glove.x_max", [](Context& c, const std::string& v) { c.config.glove.x_max = to_real("glove.x_max", v); },
       [](const PipelineConfig& p) { return r(p.glove.x_max); }},
      {"glove.alpha", [](Context& c, const std::string& v) { c.config.glove.alpha = to_real("glove.alpha", v); },
       [](const PipelineConfig& p) { return r(p.glove.alpha); }},
      {"glove.learning_rate",
       [](Context& c, const std::string& v) { c.config.glove.learning_rate = to_real("glove.learning_rate", v); },
       [](const PipelineConfig& p) { return r(p.glove.learning_rate); }},
      {"glove.weighting", [](Context& c, const std::string& v) { c.config.glove.weighting = parse_weighting(v); },
       [](const PipelineConfig& p) { return to_string(p.glove.weighting); }},
      {"glove.grad_clip",
       [](Context& c, const std::string& v) { c.config.glove.grad_clip = to_real("glove.grad_clip", v); },
       [](const PipelineConfig& p) { return r(p.glove.grad_clip); }},

      {"align.method", [](Context& c, const std::string& v) { c.config.method = parse_align_method(v); },
       [](const PipelineConfig& p) { return to_string(p.method); }},
      {"align.frequency_adjust",
       [](Context& c, const std::string& v) {
         c.config.prepare.frequency_adjust = to_bool("align.frequency_adjust", v);
       },
       [](const PipelineConfig& p) { return b(p.prepare.frequency_adjust); }},
      {"align.adjust_before_normalize",
       [](Context& c, const std::string& v) {
         c.config.prepare.adjust_before_normalize = to_bool("align.adjust_before_normalize", v);
       },
       [](const PipelineConfig& p) { return b(p.prepare.adjust_before_normalize); }},

      {"measures.knn_k",
       [](Context& c, const std::string& v) { c.config.measures.knn_k = to_uint("measures.knn_k", v); },
       [](const PipelineConfig& p) { return std::to_string(p.measures.knn_k); }},
      {"measures.svm_lambda",
       [](Context& c, const std::string& v) { c.config.measures.svm.lambda = to_real("measures.svm_lambda", v); },
       [](const PipelineConfig& p) { return r(p.measures.svm.lambda); }},
      {"measures.svm_epochs",
       [](Context& c, const std::string& v) { c.config.measures.svm.epochs = to_int("measures.svm_epochs", v); },
       [](const PipelineConfig& p) { return std::to_string(p.measures.svm.epochs); }},
      {"measures.center_offsets",
       [](Context& c, const std::string& v) {
         c.config.measures.center_offsets = to_bool("measures.center_offsets", v);
       },
       [](const PipelineConfig& p) { return b(p.measures.center_offsets); }},
      {"measures.ec_source",
       [](Context& c, const std::string& v) {
         if (v == "training") c.config.ec_source = EcSource::Training;
         else if (v == "raw") c.config.ec_source = EcSource::Raw;
         else bad_value("measures.ec_source", v, "'training' or 'raw'");
       },
       [](const PipelineConfig& p) { return std::string(p.ec_source == EcSource::Raw ? "raw" : "training"); }},
      {"measures.rank_absolute",
       [](Context& c, const std::string& v) { c.config.rank_absolute = to_bool("measures.rank_absolute", v); },
       [](const PipelineConfig& p) { return b(p.rank_absolute); }},

      {"dialectogram.focals", [](Context& c, const std::string& v) { c.config.focals = to_list(v); },
       [](const PipelineConfig& p) { return join(p.focals); }},
      {"dialectogram.formats",
       [](Context& c, const std::string& v) {
         c.config.formats = to_list(v);
         for (const auto& f : c.config.formats) parse_export_format(f);
       },
       [](const PipelineConfig& p) { return join(p.formats); }},
      {"dialectogram.exclude_top",
       [](Context& c, const std::string& v) { c.config.exclude_top = to_uint("dialectogram.exclude_top", v); },
       [](const PipelineConfig& p) { return std::to_string(p.exclude_top); }},
      {"dialectogram.label_count",
       [](Context& c, const std::string& v) { c.config.label_count = to_uint("dialectogram.label_count", v); },
       [](const PipelineConfig& p) { return std::to_string(p.label_count); }},
      {"dialectogram.threshold",
       [](Context& c, const std::string& v) { c.config.threshold = to_real("dialectogram.threshold", v); },
       [](const PipelineConfig& p) { return r(p.threshold); }},
      {"dialectogram.aggregate_top",
       [](Context& c, const std::string& v) { c.config.aggregate_top = to_uint("dialectogram.aggregate_top", v); },
       [](const PipelineConfig& p) { return std::to_string(p.aggregate_top); }},

      {"swapbench.corpus", [](Context& c, const std::string& v) { c.config.swap_corpus = resolve(c.base, v); },
       [](const PipelineConfig& p) { return p.swap_corpus.string(); }},
      {"swapbench.pos_map", [](Context& c, const std::string& v) { c.config.pos_map = resolve(c.base, v); },
       [](const PipelineConfig& p) { return p.pos_map.string(); }},
      {"swapbench.deciles",
       [](Context& c, const std::string& v) { c.config.sampling.deciles = to_int("swapbench.deciles", v); },
       [](const PipelineConfig& p) { return std::to_string(p.sampling.deciles); }},
      {"swapbench.pairs_per_decile",
       [](Context& c, const std::string& v) {
         c.config.sampling.pairs_per_decile = to_int("swapbench.pairs_per_decile", v);
       },
       [](const PipelineConfig& p) { return std::to_string(p.sampling.pairs_per_decile); }},
      {"swapbench.degrees",
       [](Context& c, const std::string& v) {
         c.config.sampling.degrees.clear();
         for (const auto& d : to_list(v)) c.config.sampling.degrees.push_back(to_real("swapbench.degrees", d));
       },
       [](const PipelineConfig& p) {
         std::vector<std::string> items;
         for (double d : p.sampling.degrees) items.push_back(r(d));
         return join(items);
       }},
      {"swapbench.min_count",
       [](Context& c, const std::string& v) { c.config.swap_min_count = to_uint("swapbench.min_count", v); },
       [](const PipelineConfig& p) { return std::to_string(p.swap_min_count); }},

      {"pipeline.seed", [](Context& c, const std::string& v) { c.config.seed = to_uint("pipeline.seed", v); },
       [](const PipelineConfig& p) { return std::to_string(p.seed); }},
      {"pipeline.threads", [](Context& c, const std::string& v) { c.config.threads = to_int("pipeline.threads", v); },
       [](const PipelineConfig& p) { return std::to_string(p.threads); }},
      {"pipeline.output_dir",
       [](Context& c, const std::string& v) { c.config.output_dir = resolve(c.base, v); },
       [](const PipelineConfig& p) { return p.output_dir.string(); }},
      {"pipeline.compress",
       [](Context& c, const std::string& v) { c.config.compress = to_bool("pipeline.compress", v); },
       [](const PipelineConfig& p) { return b(p.compress); }},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate(bool require_corpora) const {
  if (require_corpora) {
    if (corpus1.empty()) throw ConfigError("config key 'corpus.corpus1' is required");
    if (corpus2.empty()) throw ConfigError("config key 'corpus.corpus2' is required");
    for (const auto* p : {&corpus1, &corpus2}) {
      if (!fs::exists(*p)) throw ConfigError("corpus file not found: " + p->string());
    }
  }
  if (min_count < 1) throw ConfigError("corpus.min_count must be >= 1");
  if (cooc.window < 1) throw ConfigError("corpus.window must be >= 1");
  glove.validate();
  if (measures.knn_k < 1) throw ConfigError("measures.knn_k must be >= 1");
  if (!(measures.svm.lambda > 0.0)) throw ConfigError("measures.svm_lambda must be > 0");
  if (measures.svm.epochs < 1) throw ConfigError("measures.svm_epochs must be >= 1");
  if (!(threshold > 0.0)) throw ConfigError("dialectogram.threshold must be > 0");
  if (threads < 1) throw ConfigError("pipeline.threads must be >= 1");
  sampling.validate();
}

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.message()) + " (line " + std::to_string(e.line()) + ")");
  }
  PipelineConfig config;
  Context ctx{config, base_dir};
  for (const auto& [section, node] : tree) {
    if (node.empty()) throw ConfigError("config key '" + section + "' is outside any [section]");
    for (const auto& [key, value] : node) {
      const std::string name = section + "." + key;
      const auto& table = fields();
      auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return name == f.key; });
      if (it == table.end()) throw ConfigError("unknown config key '" + name + "'");
      it->set(ctx, value.get_value<std::string>());
    }
  }
  return config;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse_config(read_file(path), path.parent_path());
}

std::string canonical_config(const PipelineConfig& config, bool include_paths) {
  static const std::vector<std::string> path_keys = {"corpus.corpus1", "corpus.corpus2", "swapbench.corpus",
                                                     "swapbench.pos_map", "pipeline.output_dir"};
  std::vector<std::string> lines;
  for (const auto& f : fields()) {
    if (!include_paths && std::find(path_keys.begin(), path_keys.end(), f.key) != path_keys.end()) continue;
    lines.push_back(std::string(f.key) + "=" + f.get(config));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string config_hash(const PipelineConfig& config) {
  return hex64(fnv1a(canonical_config(config, false)));
}

void apply_globals(PipelineConfig& config) {
  config.cooc.threads = config.threads;
  config.glove.threads = config.threads;
  config.glove.seed = config.seed;
  config.measures.threads = config.threads;
  config.measures.svm.seed = derive_seed(config.seed, 5);
  config.sampling.seed = config.seed;
}

}  // namespace dialectoscope
