#include <cmath>
#include <initializer_list>
#include <json.hpp>

#include "gecqe/cli.hpp"
#include "gecqe/errors.hpp"

namespace gecqe::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void allow_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto k : keys) known = known || k == key;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::vector<fs::path> paths(const json& obj, const char* key, const std::string& where, const fs::path& base) {
  std::vector<fs::path> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (it->is_string()) {
    out.push_back(resolve(base, it->get<std::string>()));
    return out;
  }
  if (!it->is_array()) throw ConfigError(where + "." + key + " must be a path or a list of paths");
  for (const auto& v : *it) {
    if (!v.is_string()) throw ConfigError(where + "." + key + " must contain only paths");
    out.push_back(resolve(base, v.get<std::string>()));
  }
  return out;
}

std::optional<fs::path> optional_path(const json& obj, const char* key, const std::string& where,
                                      const fs::path& base) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(where + "." + key + " must be a path");
  return resolve(base, it->get<std::string>());
}

TrainConfig train_config(const json& obj, const std::string& where, TrainConfig base) {
  allow_keys(obj, where, {"epochs", "learning_rate", "batch_size", "eval_every"});
  base.epochs = get<std::size_t>(obj, "epochs", where, base.epochs);
  base.learning_rate = get<double>(obj, "learning_rate", where, base.learning_rate);
  base.batch_size = get<std::size_t>(obj, "batch_size", where, base.batch_size);
  base.eval_every = get<bool>(obj, "eval_every", where, base.eval_every);
  base.validate();
  return base;
}

}  // namespace

RunConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(doc, "config",
             {"output_dir", "corpora", "taxonomy", "ged_metric", "edit_types", "encoder", "ged_train",
              "qe_train", "pairs", "seeds", "parallel_seeds", "scoring", "judgments", "metrics", "analysis"});
  RunConfig cfg;
  if (auto p = optional_path(doc, "output_dir", "config", base_dir)) cfg.output_dir = *p;

  if (auto it = doc.find("corpora"); it != doc.end()) {
    const json& c = *it;
    allow_keys(c, "corpora", {"ged_train", "ged_dev", "qe", "qe_split", "split_seed", "add_qe_train_to_ged"});
    cfg.ged_train = paths(c, "ged_train", "corpora", base_dir);
    cfg.ged_dev = paths(c, "ged_dev", "corpora", base_dir);
    cfg.qe_corpus = optional_path(c, "qe", "corpora", base_dir);
    if (auto s = c.find("qe_split"); s != c.end()) {
      const auto ratios = get<std::vector<double>>(c, "qe_split", "corpora", {});
      if (ratios.size() != 3) throw ConfigError("corpora.qe_split must list train, dev and devtest ratios");
      double total = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        if (!(ratios[i] >= 0.0)) throw ConfigError("corpora.qe_split ratios must be non-negative");
        cfg.qe_split.ratios[i] = ratios[i];
        total += ratios[i];
      }
      if (std::abs(total - 1.0) > 1e-9) throw ConfigError("corpora.qe_split ratios must sum to 1");
    }
    cfg.qe_split.seed = get<std::uint64_t>(c, "split_seed", "corpora", 0);
    cfg.add_qe_train_to_ged = get<bool>(c, "add_qe_train_to_ged", "corpora", false);
  }

  cfg.taxonomy = parse_taxonomy_name(get<std::string>(doc, "taxonomy", "config", "binary"));
  cfg.ged_metric = parse_ged_metric(get<std::string>(doc, "ged_metric", "config", "f0.5"));
  const auto edit_types = get<std::string>(doc, "edit_types", "config", "reclassify");
  if (edit_types == "reclassify") {
    cfg.edit_types = EditTypes::reclassify;
  } else if (edit_types == "keep") {
    cfg.edit_types = EditTypes::keep;
  } else {
    throw ConfigError("edit_types must be 'reclassify' or 'keep'");
  }

  if (auto it = doc.find("encoder"); it != doc.end()) {
    allow_keys(*it, "encoder", {"dim", "depth", "min_count"});
    cfg.encoder.dim = get<std::size_t>(*it, "dim", "encoder", cfg.encoder.dim);
    cfg.encoder.depth = get<std::size_t>(*it, "depth", "encoder", cfg.encoder.depth);
    cfg.min_count = get<std::size_t>(*it, "min_count", "encoder", cfg.min_count);
    if (cfg.encoder.dim < 2) throw ConfigError("encoder.dim must be at least 2");
    if (cfg.min_count < 1) throw ConfigError("encoder.min_count must be at least 1");
  }
  if (auto it = doc.find("ged_train"); it != doc.end()) cfg.ged = train_config(*it, "ged_train", cfg.ged);
  if (auto it = doc.find("qe_train"); it != doc.end()) cfg.qe = train_config(*it, "qe_train", cfg.qe);

  if (auto it = doc.find("pairs"); it != doc.end()) {
    allow_keys(*it, "pairs", {"k", "seed", "annotator", "max_retries"});
    cfg.pairs.pairs_per_sentence = get<std::size_t>(*it, "k", "pairs", cfg.pairs.pairs_per_sentence);
    cfg.pairs.max_retries = get<std::size_t>(*it, "max_retries", "pairs", cfg.pairs.max_retries);
    cfg.pairs.annotator = get<std::size_t>(*it, "annotator", "pairs", cfg.pairs.annotator);
    cfg.pair_seed = get<std::uint64_t>(*it, "seed", "pairs", cfg.pair_seed);
    if (cfg.pairs.pairs_per_sentence < 1) throw ConfigError("pairs.k must be at least 1");
    if (cfg.pairs.max_retries < 1) throw ConfigError("pairs.max_retries must be at least 1");
  }

  cfg.seeds = get<std::vector<std::uint64_t>>(doc, "seeds", "config", cfg.seeds);
  if (cfg.seeds.empty()) throw ConfigError("seeds must list at least one seed");
  cfg.parallel_seeds = get<bool>(doc, "parallel_seeds", "config", false);

  if (auto it = doc.find("scoring"); it != doc.end()) {
    allow_keys(*it, "scoring", {"mode", "theta", "checkpoint", "similarity_checkpoint", "similarity_seed"});
    cfg.scoring.mode = parse_score_mode(get<std::string>(*it, "mode", "scoring", "filter_free"));
    cfg.scoring.theta = get<double>(*it, "theta", "scoring", cfg.scoring.theta);
    if (!(cfg.scoring.theta >= -1.0 && cfg.scoring.theta <= 1.0)) {
      throw ConfigError("scoring.theta must lie in [-1, 1]");
    }
    cfg.scoring.checkpoint = optional_path(*it, "checkpoint", "scoring", base_dir);
    cfg.scoring.similarity_checkpoint = optional_path(*it, "similarity_checkpoint", "scoring", base_dir);
    cfg.scoring.similarity_seed = get<std::uint64_t>(*it, "similarity_seed", "scoring", 0);
  }

  cfg.judgments = optional_path(doc, "judgments", "config", base_dir);

  if (auto it = doc.find("metrics"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("metrics must be a list");
    for (const auto& m : *it) {
      allow_keys(m, "metrics entry", {"name", "scores"});
      MetricSource src;
      src.name = get<std::string>(m, "name", "metrics entry", "");
      if (src.name.empty()) throw ConfigError("every metrics entry needs a name");
      for (const auto& other : cfg.metrics) {
        if (other.name == src.name) throw ConfigError("duplicate metric name '" + src.name + "'");
      }
      src.scores = optional_path(m, "scores", "metrics entry", base_dir);
      cfg.metrics.push_back(std::move(src));
    }
  }

  if (auto it = doc.find("analysis"); it != doc.end()) {
    allow_keys(*it, "analysis",
               {"window", "bootstrap_iterations", "bootstrap_seed", "trueskill_seed", "trueskill_passes"});
    auto& a = cfg.analysis;
    a.window = get<std::size_t>(*it, "window", "analysis", a.window);
    a.bootstrap_iterations = get<std::size_t>(*it, "bootstrap_iterations", "analysis", a.bootstrap_iterations);
    a.bootstrap_seed = get<std::uint64_t>(*it, "bootstrap_seed", "analysis", a.bootstrap_seed);
    if (auto s = it->find("trueskill_seed"); s != it->end() && !s->is_null()) {
      a.trueskill_seed = get<std::uint64_t>(*it, "trueskill_seed", "analysis", 0);
    }
    a.trueskill_passes = get<std::size_t>(*it, "trueskill_passes", "analysis", a.trueskill_passes);
    if (a.window < 2) throw ConfigError("analysis.window must be at least 2");
    if (a.bootstrap_iterations < 100) throw ConfigError("analysis.bootstrap_iterations must be at least 100");
    if (a.trueskill_passes < 1) throw ConfigError("analysis.trueskill_passes must be at least 1");
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(text, base);
}

}  // namespace gecqe::cli
