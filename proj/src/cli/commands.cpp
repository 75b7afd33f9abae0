#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <utility>

#include "gecqe/align.hpp"
#include "gecqe/cli.hpp"
#include "gecqe/errors.hpp"
#include "gecqe/metaeval.hpp"
#include "gecqe/tagger.hpp"

namespace gecqe::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::vector<LabeledSentence> label_corpus(const std::vector<ParallelPair>& pairs, TaxonomyName taxonomy,
                                          EditTypes edit_types, std::size_t annotator) {
  const Taxonomy& tax = Taxonomy::get(taxonomy);
  const Taxonomy& full = Taxonomy::get(TaxonomyName::full55);
  const auto& tagger = LexiconTagger::instance();
  std::vector<LabeledSentence> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    std::vector<Edit> edits = edits_for(pair, annotator);
    for (auto& e : edits) {
      const bool usable = edit_types == EditTypes::keep && full.index_of(e.etype).has_value();
      if (!usable) e.etype = classify_edit(e, tagger);
    }
    out.push_back(project_labels(pair.source.tokens, edits, tax));
  }
  return out;
}

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string in;
  std::string checkpoint;
  std::string judgments;
  std::string taxonomy;
  std::string edit_types;
  std::string mode;
  double theta = std::nan("");
  long long k = -1;
  long long seed = -1;
  long long annotator = -1;
  long long window = -1;
  std::vector<std::string> metrics;  // NAME=PATH
};

std::string number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson json_number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void write_output(std::ostream& log, const fs::path& path, std::string_view content) {
  write_file(path, content);
  log << "wrote " << path.string() << '\n';
}

class Runner {
 public:
  Runner(const Flags& flags, std::ostream& log) : flags_(flags), log_(log) {
    if (!flags.config.empty()) {
      cfg_ = load_config(flags.config);
    }
    if (!flags.out.empty()) cfg_.output_dir = flags.out;
    if (!flags.judgments.empty()) cfg_.judgments = fs::path(flags.judgments);
    if (!flags.taxonomy.empty()) cfg_.taxonomy = parse_taxonomy_name(flags.taxonomy);
    if (!flags.edit_types.empty()) {
      if (flags.edit_types == "reclassify") {
        cfg_.edit_types = EditTypes::reclassify;
      } else if (flags.edit_types == "keep") {
        cfg_.edit_types = EditTypes::keep;
      } else {
        throw ConfigError("--edit-types must be 'reclassify' or 'keep'");
      }
    }
    if (!flags.mode.empty()) cfg_.scoring.mode = parse_score_mode(flags.mode);
    if (!std::isnan(flags.theta)) {
      if (!(flags.theta >= -1.0 && flags.theta <= 1.0)) throw ConfigError("--theta must lie in [-1, 1]");
      cfg_.scoring.theta = flags.theta;
    }
    if (!flags.checkpoint.empty()) cfg_.scoring.checkpoint = fs::path(flags.checkpoint);
    if (flags.k >= 0) {
      if (flags.k == 0) throw ConfigError("--k must be at least 1");
      cfg_.pairs.pairs_per_sentence = static_cast<std::size_t>(flags.k);
    }
    if (flags.seed >= 0) cfg_.pair_seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.annotator >= 0) cfg_.pairs.annotator = static_cast<std::size_t>(flags.annotator);
    if (flags.window >= 0) {
      if (flags.window < 2) throw ConfigError("--window must be at least 2");
      cfg_.analysis.window = static_cast<std::size_t>(flags.window);
    }
    if (!flags.metrics.empty()) {
      cfg_.metrics.clear();
      for (const auto& spec : flags.metrics) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--metric expects NAME=PATH, got '" + spec + "'");
        MetricSource m{spec.substr(0, eq), std::nullopt};
        if (eq + 1 < spec.size()) m.scores = fs::path(spec.substr(eq + 1));
        cfg_.metrics.push_back(std::move(m));
      }
    }
  }

  const std::string& stage() const { return stage_; }

  void extract_edits() {
    stage_ = "extract-edits";
    auto pairs = load_parallel(require_in());
    const auto& tagger = LexiconTagger::instance();
    for (auto& pair : pairs) {
      std::vector<std::vector<Edit>> per_annotator;
      for (const auto& correction : pair.corrections) {
        per_annotator.push_back(extract_typed_edits(pair.source.tokens, correction.tokens, tagger));
      }
      pair.annotator_edits = std::move(per_annotator);
    }
    write_output(log_, cfg_.output_dir / "edits.m2", serialize_m2(pairs));
  }

  void label_ged() {
    stage_ = "label-ged";
    const auto pairs = load_parallel(require_in());
    const auto labeled = label_corpus(pairs, cfg_.taxonomy, cfg_.edit_types, cfg_.pairs.annotator);
    write_output(log_, cfg_.output_dir / "labels.tsv", serialize_labeled(labeled));
  }

  void gen_pairs() {
    stage_ = "gen-pairs";
    if (flags_.checkpoint.empty()) throw ConfigError("gen-pairs needs --checkpoint");
    const EncoderCheckpoint ck = load_checkpoint(flags_.checkpoint);
    const auto pairs = load_parallel(require_in());
    const auto dataset = build_pair_dataset(ck, pairs, cfg_.pairs, cfg_.pair_seed);
    write_output(log_, cfg_.output_dir / "pairs.jsonl", serialize_pairs(dataset));
  }

  void train() {
    stage_ = "train: load corpora";
    if (cfg_.ged_train.empty()) throw ConfigError("corpora.ged_train is required for train");
    if (cfg_.ged_dev.empty()) throw ConfigError("corpora.ged_dev is required for train");
    if (!cfg_.qe_corpus) throw ConfigError("corpora.qe is required for train");
    std::vector<ParallelPair> ged_train_pairs, ged_dev_pairs;
    for (const auto& p : cfg_.ged_train) {
      auto v = load_parallel(p);
      ged_train_pairs.insert(ged_train_pairs.end(), v.begin(), v.end());
    }
    for (const auto& p : cfg_.ged_dev) {
      auto v = load_parallel(p);
      ged_dev_pairs.insert(ged_dev_pairs.end(), v.begin(), v.end());
    }
    const DatasetSplit split = split_dataset(load_parallel(*cfg_.qe_corpus), cfg_.qe_split);
    if (cfg_.add_qe_train_to_ged) {
      ged_train_pairs.insert(ged_train_pairs.end(), split.train.begin(), split.train.end());
    }

    stage_ = "train: label GED data";
    PipelineData data;
    data.ged_train = label_corpus(ged_train_pairs, cfg_.taxonomy, cfg_.edit_types, cfg_.pairs.annotator);
    data.ged_dev = label_corpus(ged_dev_pairs, cfg_.taxonomy, cfg_.edit_types, cfg_.pairs.annotator);
    data.qe_train = split.train;
    data.qe_dev = split.dev;
    data.qe_devtest = split.devtest;

    std::vector<Tokens> vocab_text;
    for (const std::vector<ParallelPair>* corpus : {&std::as_const(ged_train_pairs), &split.train}) {
      for (const auto& pair : *corpus) {
        vocab_text.push_back(pair.source.tokens);
        for (const auto& c : pair.corrections) vocab_text.push_back(c.tokens);
      }
    }

    PipelineConfig pc;
    pc.encoder = cfg_.encoder;
    pc.vocab = Vocab::build(vocab_text, cfg_.min_count);
    pc.taxonomy = cfg_.taxonomy;
    pc.ged_metric = cfg_.ged_metric;
    pc.ged = cfg_.ged;
    pc.qe = cfg_.qe;
    pc.pairs = cfg_.pairs;
    pc.pair_seed = cfg_.pair_seed;

    stage_ = "train: GED and QE runs";
    SelectionProtocol protocol;
    protocol.seeds = cfg_.seeds;
    const SelectionResult result =
        select_over_seeds(protocol, [&](std::uint64_t seed) { return run_pipeline(data, pc, seed); },
                          cfg_.parallel_seeds ? Exec::parallel : Exec::serial);

    stage_ = "train: write outputs";
    const fs::path dir = cfg_.output_dir;
    ojson runs = ojson::array();
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      const SeedRun& run = result.runs[i];
      const std::string prefix = "run" + std::to_string(i) + "_";
      write_output(log_, dir / (prefix + "ged.json"), serialize_checkpoint(run.ged.checkpoint));
      write_output(log_, dir / (prefix + "qe.json"), serialize_checkpoint(run.qe.checkpoint));
      write_output(log_, dir / (prefix + "ged_log.jsonl"), serialize_log(run.ged.log));
      write_output(log_, dir / (prefix + "qe_log.jsonl"), serialize_log(run.qe.log));
      runs.push_back({{"index", i},
                      {"seed", run.seed},
                      {"ged_checkpoint", prefix + "ged.json"},
                      {"ged_hash", content_hash(run.ged.checkpoint)},
                      {"ged_selected_epoch", run.ged.selected_epoch},
                      {"qe_checkpoint", prefix + "qe.json"},
                      {"qe_hash", content_hash(run.qe.checkpoint)},
                      {"qe_parent_hash", run.qe.checkpoint.parent_hash.value_or("")},
                      {"qe_selected_epoch", run.qe.selected_epoch},
                      {"devtest_accuracy", run.devtest_accuracy}});
    }
    const SeedRun& best = result.best();
    write_output(log_, dir / "qe.json", serialize_checkpoint(best.qe.checkpoint));

    ojson manifest;
    manifest["created_at"] = timestamp();
    manifest["taxonomy"] = taxonomy_name(cfg_.taxonomy);
    manifest["ged_metric"] = ged_metric_name(cfg_.ged_metric);
    manifest["data"] = {{"ged_train_sentences", data.ged_train.size()},
                        {"ged_dev_sentences", data.ged_dev.size()},
                        {"qe_train_sentences", data.qe_train.size()},
                        {"qe_dev_sentences", data.qe_dev.size()},
                        {"qe_devtest_sentences", data.qe_devtest.size()},
                        {"vocab_size", pc.vocab.size()}};
    manifest["runs"] = std::move(runs);
    manifest["selected_index"] = result.selected;
    manifest["selected_seed"] = best.seed;
    manifest["selection_rule"] = "highest devtest ranking accuracy, lowest index on ties";
    manifest["qe_checkpoint"] = "qe.json";
    manifest["qe_hash"] = content_hash(best.qe.checkpoint);
    write_output(log_, dir / "manifest.json", manifest.dump(2) + "\n");
  }

  void score() {
    stage_ = "score";
    const fs::path ck_path = cfg_.scoring.checkpoint.value_or(cfg_.output_dir / "qe.json");
    const EncoderCheckpoint qe = load_checkpoint(ck_path);
    if (!qe.qe_head) throw ConfigError("checkpoint " + ck_path.string() + " has no QE head");
    const JudgmentSet judgments = load_judgments(require_judgments());

    ScoringSetup setup;
    setup.qe = &qe;
    setup.mode = cfg_.scoring.mode;
    setup.theta = cfg_.scoring.theta;
    EncoderCheckpoint sim;
    ScoreRunInfo info{content_hash(qe), std::nullopt};
    std::optional<double> theta;
    if (setup.mode == ScoreMode::legacy) {
      if (cfg_.scoring.similarity_checkpoint) {
        sim = load_checkpoint(*cfg_.scoring.similarity_checkpoint);
      } else {
        sim = EncoderCheckpoint::initialize(
            EncoderConfig{qe.config.dim, qe.config.depth, cfg_.scoring.similarity_seed}, qe.vocab);
      }
      setup.similarity = &sim;
      info.similarity_hash = content_hash(sim);
      theta = setup.theta;
    }
    const auto records = score_corpus(setup, judgments);
    write_output(log_, cfg_.output_dir / "scores.tsv", serialize_scores_tsv(records));
    write_output(log_, cfg_.output_dir / "scores.json", serialize_scores_json(records, info, setup.mode, theta));
  }

  void metaeval() {
    stage_ = "metaeval";
    const Inputs in = load_inputs();
    const TrueSkillParams params = trueskill_params();
    const SystemRanking human = human_ranking_trueskill(in.judgments, params);

    ojson report;
    report["systems"] = in.judgments.systems.size();
    report["sources"] = in.judgments.sources.size();
    report["human_judgments"] = in.judgments.human_pairwise.size();
    report["trueskill"] = {{"mu0", params.mu0},
                           {"sigma0", params.sigma0},
                           {"beta", params.beta},
                           {"tau", params.tau},
                           {"draw_probability", params.draw_probability},
                           {"passes", params.passes},
                           {"shuffle_seed", params.shuffle_seed ? ojson(*params.shuffle_seed) : ojson(nullptr)}};
    report["human_ranking"] = ranking_json(human);

    std::vector<SystemRanking> rankings;
    std::string tsv = "metric\tpearson\tspearman\taccuracy\tkendall_tau\n";
    ojson metrics = ojson::array();
    for (std::size_t m = 0; m < in.names.size(); ++m) {
      stage_ = "metaeval: metric " + in.names[m];
      rankings.push_back(metric_ranking_trueskill(in.tables[m], in.judgments, params));
      ojson entry;
      entry["name"] = in.names[m];
      double r = NAN, rho = NAN;
      try {
        const SystemCorrelation sc = system_correlation(rankings.back(), human);
        r = sc.pearson;
        rho = sc.spearman;
      } catch (const std::domain_error& e) {
        entry["system_note"] = e.what();
      }
      entry["system"] = {{"pearson", json_number(r)}, {"spearman", json_number(rho)}, {"n", human.size()}};
      double acc = NAN, tau = NAN;
      try {
        const SentenceAgreement sa = sentence_agreement(in.tables[m], in.judgments.human_pairwise);
        acc = sa.accuracy;
        tau = sa.kendall_tau;
        entry["sentence"] = {{"accuracy", acc},
                             {"kendall_tau", tau},
                             {"concordant", sa.concordant},
                             {"discordant", sa.discordant},
                             {"total", sa.total}};
      } catch (const std::domain_error& e) {
        entry["sentence"] = {{"accuracy", nullptr}, {"kendall_tau", nullptr}, {"note", e.what()}};
      }
      entry["ranking"] = ranking_json(rankings.back());
      metrics.push_back(std::move(entry));
      tsv += in.names[m] + "\t" + number(r) + "\t" + number(rho) + "\t" + number(acc) + "\t" + number(tau) + "\n";
    }
    report["metrics"] = std::move(metrics);

    stage_ = "metaeval: comparisons";
    ojson comparisons = ojson::array();
    for (std::size_t a = 0; a < in.names.size(); ++a) {
      for (std::size_t b = a + 1; b < in.names.size(); ++b) {
        comparisons.push_back(compare(in, human, rankings, a, b));
      }
    }
    report["comparisons"] = std::move(comparisons);

    stage_ = "metaeval: window analysis";
    report["window"] = window_json(in, human, rankings);
    stage_ = "metaeval: pairwise analysis";
    report["pairwise"] = pairwise_json(in);

    write_output(log_, cfg_.output_dir / "report.json", report.dump(2) + "\n");
    write_output(log_, cfg_.output_dir / "report.tsv", tsv);
    write_output(log_, cfg_.output_dir / "window.csv", window_csv(in, human, rankings));
    write_output(log_, cfg_.output_dir / "pairwise.csv", pairwise_csv(in));
    if (in.names.size() >= 2) write_output(log_, cfg_.output_dir / "tau_difference.csv", tau_difference_csv(in));
  }

  void window() {
    stage_ = "window";
    const Inputs in = load_inputs();
    const TrueSkillParams params = trueskill_params();
    const SystemRanking human = human_ranking_trueskill(in.judgments, params);
    std::vector<SystemRanking> rankings;
    for (const auto& table : in.tables) rankings.push_back(metric_ranking_trueskill(table, in.judgments, params));
    write_output(log_, cfg_.output_dir / "window.csv", window_csv(in, human, rankings));
  }

  void pairwise() {
    stage_ = "pairwise";
    const Inputs in = load_inputs();
    write_output(log_, cfg_.output_dir / "pairwise.csv", pairwise_csv(in));
    if (in.names.size() >= 2) write_output(log_, cfg_.output_dir / "tau_difference.csv", tau_difference_csv(in));
  }

 private:
  struct Inputs {
    JudgmentSet judgments;
    std::vector<std::string> names;
    std::vector<ScoreTable> tables;
  };

  fs::path require_in() const {
    if (flags_.in.empty()) throw ConfigError("--in is required");
    return flags_.in;
  }

  fs::path require_judgments() const {
    if (!cfg_.judgments) throw ConfigError("no judgments file (set 'judgments' or pass --judgments)");
    return *cfg_.judgments;
  }

  Inputs load_inputs() const {
    Inputs in;
    in.judgments = load_judgments(require_judgments());
    if (cfg_.metrics.empty()) throw ConfigError("no metrics to evaluate (set 'metrics' or pass --metric)");
    for (const auto& m : cfg_.metrics) {
      const fs::path path = m.scores.value_or(cfg_.output_dir / "scores.tsv");
      try {
        in.tables.push_back(parse_scores_tsv(read_file(path)));
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
      }
      in.names.push_back(m.name);
    }
    return in;
  }

  TrueSkillParams trueskill_params() const {
    TrueSkillParams p;
    p.passes = cfg_.analysis.trueskill_passes;
    p.shuffle_seed = cfg_.analysis.trueskill_seed;
    return p;
  }

  static ojson ranking_json(const SystemRanking& ranking) {
    ojson out = ojson::array();
    for (const auto& r : ranking) out.push_back({{"system", r.system}, {"mu", r.mu}, {"sigma", r.sigma}});
    return out;
  }

  static std::vector<double> mus(const SystemRanking& ranking, const SystemRanking& order) {
    std::map<std::string, double> by_name;
    for (const auto& r : ranking) by_name[r.system] = r.mu;
    std::vector<double> out;
    for (const auto& r : order) out.push_back(by_name.at(r.system));
    return out;
  }

  ojson compare(const Inputs& in, const SystemRanking& human, const std::vector<SystemRanking>& rankings,
                std::size_t a, std::size_t b) const {
    ojson out;
    out["metric_a"] = in.names[a];
    out["metric_b"] = in.names[b];
    const auto h = mus(human, human);
    const auto xa = mus(rankings[a], human);
    const auto xb = mus(rankings[b], human);
    try {
      const double r12 = pearson(h, xa);
      const double r13 = pearson(h, xb);
      const double r23 = pearson(xa, xb);
      const WilliamsResult w = williams_test(r12, r13, r23, h.size());
      out["williams"] = {{"r_human_a", r12}, {"r_human_b", r13}, {"r_a_b", r23},
                         {"n", h.size()},    {"t", w.t},         {"p_value", w.p_value}};
    } catch (const std::domain_error& e) {
      out["williams"] = {{"t", nullptr}, {"p_value", nullptr}, {"note", e.what()}};
    }
    try {
      const double p = bootstrap_compare(in.tables[a], in.tables[b], in.judgments.human_pairwise,
                                         cfg_.analysis.bootstrap_iterations, cfg_.analysis.bootstrap_seed);
      out["bootstrap"] = {{"iterations", cfg_.analysis.bootstrap_iterations},
                          {"seed", cfg_.analysis.bootstrap_seed},
                          {"p_b_not_worse", p}};
    } catch (const std::domain_error& e) {
      out["bootstrap"] = {{"p_b_not_worse", nullptr}, {"note", e.what()}};
    }
    return out;
  }

  ojson window_json(const Inputs& in, const SystemRanking& human, const std::vector<SystemRanking>& rankings) const {
    ojson out;
    out["window"] = cfg_.analysis.window;
    ojson per_metric = ojson::array();
    for (std::size_t m = 0; m < in.names.size(); ++m) {
      ojson rows = ojson::array();
      for (const auto& r : window_analysis(rankings[m], human, cfg_.analysis.window)) {
        rows.push_back({{"start_rank", r.start_rank}, {"pearson", json_number(r.pearson)},
                        {"spearman", json_number(r.spearman)}});
      }
      per_metric.push_back({{"metric", in.names[m]}, {"rows", std::move(rows)}});
    }
    out["metrics"] = std::move(per_metric);
    return out;
  }

  std::string window_csv(const Inputs& in, const SystemRanking& human,
                         const std::vector<SystemRanking>& rankings) const {
    std::string csv = "metric,start_rank,end_rank,pearson,spearman\n";
    for (std::size_t m = 0; m < in.names.size(); ++m) {
      for (const auto& r : window_analysis(rankings[m], human, cfg_.analysis.window)) {
        csv += in.names[m] + "," + std::to_string(r.start_rank) + "," +
               std::to_string(r.start_rank + cfg_.analysis.window - 1) + "," + number(r.pearson) + "," +
               number(r.spearman) + "\n";
      }
    }
    return csv;
  }

  std::vector<RankGroupMatrix> matrices(const Inputs& in) const {
    std::vector<RankGroupMatrix> out;
    for (const auto& table : in.tables) {
      out.push_back(pairwise_rank_groups(table, in.judgments, in.judgments.systems.size()));
    }
    return out;
  }

  ojson pairwise_json(const Inputs& in) const {
    ojson out = ojson::array();
    const auto mats = matrices(in);
    for (std::size_t m = 0; m < mats.size(); ++m) {
      ojson cells = ojson::array();
      for (std::size_t a = 0; a < mats[m].n_systems; ++a) {
        for (std::size_t b = a + 1; b < mats[m].n_systems; ++b) {
          const RankCell& c = mats[m].cells[a][b];
          if (c.empty()) continue;
          cells.push_back({{"rank_a", a + 1}, {"rank_b", b + 1}, {"count", c.count},
                           {"agreement", c.agreement()}, {"tau", c.tau()}});
        }
      }
      out.push_back({{"metric", in.names[m]},
                     {"tie_broken_sources", mats[m].tie_broken_sources},
                     {"cells", std::move(cells)}});
    }
    return out;
  }

  std::string pairwise_csv(const Inputs& in) const {
    std::string csv = "metric,rank_a,rank_b,count,concordant,discordant,agreement,tau\n";
    const auto mats = matrices(in);
    for (std::size_t m = 0; m < mats.size(); ++m) {
      for (std::size_t a = 0; a < mats[m].n_systems; ++a) {
        for (std::size_t b = a + 1; b < mats[m].n_systems; ++b) {
          const RankCell& c = mats[m].cells[a][b];
          csv += in.names[m] + "," + std::to_string(a + 1) + "," + std::to_string(b + 1) + "," +
                 std::to_string(c.count) + "," + std::to_string(c.concordant) + "," +
                 std::to_string(c.discordant) + "," + number(c.agreement()) + "," + number(c.tau()) + "\n";
        }
      }
    }
    return csv;
  }

  // Every metric against the first one.
  std::string tau_difference_csv(const Inputs& in) const {
    std::string csv = "metric_a,metric_b,rank_a,rank_b,tau_difference\n";
    const auto mats = matrices(in);
    for (std::size_t m = 1; m < mats.size(); ++m) {
      const auto diff = tau_difference(mats[0], mats[m]);
      for (std::size_t a = 0; a < diff.size(); ++a) {
        for (std::size_t b = a + 1; b < diff.size(); ++b) {
          csv += in.names[0] + "," + in.names[m] + "," + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                 "," + (diff[a][b] ? number(*diff[a][b]) : std::string("NA")) + "\n";
        }
      }
    }
    return csv;
  }

  static std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
  }

  const Flags& flags_;
  std::ostream& log_;
  RunConfig cfg_;
  std::string stage_ = "setup";
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grammatical error detection pretraining for quality-estimation GEC metrics", "gecqe"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    if (needs_config) opt->required();
    sub->add_option("--out", flags.out, "output directory (overrides output_dir)");
    return sub;
  };

  auto* extract = common(app.add_subcommand("extract-edits", "align parallel text and write typed edits as M2"), false);
  extract->add_option("--in", flags.in, "TSV or M2 corpus")->required();

  auto* label = common(app.add_subcommand("label-ged", "project edits onto token-level GED labels"), false);
  label->add_option("--in", flags.in, "TSV or M2 corpus")->required();
  label->add_option("--taxonomy", flags.taxonomy, "binary, op4, pos25 or full55");
  label->add_option("--edit-types", flags.edit_types, "reclassify or keep");

  auto* pairs = common(app.add_subcommand("gen-pairs", "generate ordered quality pairs with a GED checkpoint"), false);
  pairs->add_option("--in", flags.in, "TSV or M2 corpus")->required();
  pairs->add_option("--checkpoint", flags.checkpoint, "GED checkpoint")->required();
  pairs->add_option("--k", flags.k, "pairs per sentence");
  pairs->add_option("--seed", flags.seed, "sampling seed");
  pairs->add_option("--annotator", flags.annotator, "annotator index");

  auto* train = common(app.add_subcommand("train", "GED then QE training with seed selection"), true);
  (void)train;

  auto* score = common(app.add_subcommand("score", "score system outputs"), false);
  score->add_option("--checkpoint", flags.checkpoint, "QE checkpoint");
  score->add_option("--judgments", flags.judgments, "judgments JSON");
  score->add_option("--mode", flags.mode, "filter_free or legacy");
  score->add_option("--theta", flags.theta, "similarity threshold for legacy mode");

  std::vector<CLI::App*> analyses;
  for (auto [name, help] : {std::pair{"metaeval", "correlations, agreement, significance and analyses"},
                            std::pair{"window", "window analysis over the human ranking"},
                            std::pair{"pairwise", "agreement grouped by metric rank pairs"}}) {
    auto* sub = common(app.add_subcommand(name, help), false);
    sub->add_option("--judgments", flags.judgments, "judgments JSON");
    sub->add_option("--metric", flags.metrics, "NAME=PATH score TSV (repeatable)");
    if (std::string_view(name) != "pairwise") sub->add_option("--window", flags.window, "window size");
    analyses.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string stage = "setup";
  try {
    Runner runner(flags, out);
    auto guarded = [&](auto&& fn) {
      try {
        fn();
      } catch (...) {
        stage = runner.stage();
        throw;
      }
    };
    if (extract->parsed()) guarded([&] { runner.extract_edits(); });
    if (label->parsed()) guarded([&] { runner.label_ged(); });
    if (pairs->parsed()) guarded([&] { runner.gen_pairs(); });
    if (train->parsed()) guarded([&] { runner.train(); });
    if (score->parsed()) guarded([&] { runner.score(); });
    if (analyses[0]->parsed()) guarded([&] { runner.metaeval(); });
    if (analyses[1]->parsed()) guarded([&] { runner.window(); });
    if (analyses[2]->parsed()) guarded([&] { runner.pairwise(); });
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "gecqe: " << stage << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "gecqe: " << stage << ": " << e.what() << '\n';
    return kExitData;
  } catch (const SchemaError& e) {
    err << "gecqe: " << stage << ": " << e.what() << '\n';
    return kExitData;
  } catch (const StructuralError& e) {
    err << "gecqe: " << stage << ": " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "gecqe: " << stage << ": " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace gecqe::cli
