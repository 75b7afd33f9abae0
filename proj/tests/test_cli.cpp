#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gecqe/cli.hpp"
#include "gecqe/errors.hpp"
#include "gecqe/metaeval.hpp"
#include "test_support.hpp"

namespace gecqe {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

std::string config() { return test::data_path("cli/config.json").string(); }

TEST(CliExtract, HealtyGivesThreeEdits) {
  const auto dir = test::scratch_dir("cli_extract");
  {
    std::ofstream(dir / "in.tsv") << test::kHealtySource << '\t' << test::kHealtyTarget << '\n';
  }
  const auto r = run_cli({"extract-edits", "--in", (dir / "in.tsv").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string m2 = slurp(dir / "edits.m2");
  EXPECT_EQ(count_prefix(m2, "S "), 1u);
  EXPECT_EQ(count_prefix(m2, "A "), 3u);
}

TEST(CliExtract, IdentityCorpusHasNoEdits) {
  const auto dir = test::scratch_dir("cli_identity");
  {
    std::ofstream f(dir / "in.tsv");
    f << "a b c\ta b c\n" << "x y\tx y\n";
  }
  ASSERT_EQ(run_cli({"extract-edits", "--in", (dir / "in.tsv").string(), "--out", dir.string()}).code, 0);
  const std::string m2 = slurp(dir / "edits.m2");
  EXPECT_EQ(count_prefix(m2, "S "), 2u);
  EXPECT_EQ(count_prefix(m2, "A ") - count_prefix(m2, "A -1 -1|||noop"), 0u);
}

TEST(CliExtract, MissingFileNamesThePath) {
  const auto dir = test::scratch_dir("cli_missing");
  const auto r = run_cli({"extract-edits", "--in", (dir / "nope.tsv").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("nope.tsv"), std::string::npos);
}

TEST(CliExtract, MalformedInputIsDataError) {
  const auto dir = test::scratch_dir("cli_bad");
  {
    std::ofstream(dir / "in.m2") << "S a b\nA zero 1|||R:OTHER|||c|||REQUIRED|||-NONE-|||0\n";
  }
  const auto r = run_cli({"extract-edits", "--in", (dir / "in.m2").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kExitData);
}

TEST(CliLabel, WritesOneBlockPerSentence) {
  const auto dir = test::scratch_dir("cli_label");
  const auto r = run_cli({"label-ged", "--in", test::data_path("sample.m2").string(), "--taxonomy", "op4", "--out",
                          dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto back = parse_labeled(slurp(dir / "labels.tsv"), TaxonomyName::op4);
  EXPECT_EQ(back.size(), 3u);
  EXPECT_EQ(run_cli({"label-ged", "--in", test::data_path("sample.m2").string(), "--taxonomy", "nine", "--out",
                     dir.string()})
                .code,
            cli::kExitUsage);
}

TEST(CliConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(cli::parse_config(R"({"bogus": 1})", "."), ConfigError);
  EXPECT_THROW(cli::parse_config(R"({"taxonomy": "op5"})", "."), ConfigError);
  EXPECT_THROW(cli::parse_config("{", "."), ConfigError);
  const auto cfg = cli::load_config(config());
  EXPECT_EQ(cfg.taxonomy, TaxonomyName::op4);
  EXPECT_EQ(cfg.seeds.size(), 2u);
  EXPECT_EQ(cfg.metrics.size(), 2u);
  EXPECT_TRUE(cfg.judgments->is_absolute());
  EXPECT_EQ(run_cli({"train"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"train", "--config", "/nonexistent/config.json"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(test::scratch_dir("cli_pipeline"));
    train_ = new Result(run_cli({"train", "--config", config(), "--out", dir_->string()}));
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete train_;
  }
  static fs::path* dir_;
  static Result* train_;
};

fs::path* CliPipeline::dir_ = nullptr;
Result* CliPipeline::train_ = nullptr;

TEST_F(CliPipeline, TrainWritesManifestAndSelectsBestRun) {
  ASSERT_EQ(train_->code, 0) << train_->err;
  const json m = json::parse(slurp(*dir_ / "manifest.json"));
  ASSERT_EQ(m["runs"].size(), 2u);
  std::size_t best = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& run = m["runs"][i];
    EXPECT_TRUE(fs::exists(*dir_ / run["qe_checkpoint"].get<std::string>()));
    EXPECT_EQ(run["qe_parent_hash"], run["ged_hash"]);
    if (run["devtest_accuracy"].get<double>() > m["runs"][best]["devtest_accuracy"].get<double>()) best = i;
  }
  EXPECT_EQ(m["selected_index"].get<std::size_t>(), best);
  EXPECT_EQ(content_hash(load_checkpoint(*dir_ / "qe.json")), m["qe_hash"].get<std::string>());
}

TEST_F(CliPipeline, RetrainingReproducesHashes) {
  ASSERT_EQ(train_->code, 0);
  const auto again = test::scratch_dir("cli_pipeline_again");
  ASSERT_EQ(run_cli({"train", "--config", config(), "--out", again.string()}).code, 0);
  const json a = json::parse(slurp(*dir_ / "manifest.json"));
  const json b = json::parse(slurp(again / "manifest.json"));
  EXPECT_EQ(a["runs"], b["runs"]);
  EXPECT_EQ(slurp(*dir_ / "qe.json"), slurp(again / "qe.json"));
}

TEST_F(CliPipeline, ScoreThenMetaeval) {
  ASSERT_EQ(train_->code, 0);
  auto r = run_cli({"score", "--config", config(), "--out", dir_->string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = parse_scores_tsv(slurp(*dir_ / "scores.tsv"));
  EXPECT_EQ(table.size(), 12u * 12u);
  const json scores = json::parse(slurp(*dir_ / "scores.json"));
  EXPECT_EQ(scores["checkpoint_hash"], content_hash(load_checkpoint(*dir_ / "qe.json")));

  r = run_cli({"metaeval", "--config", config(), "--out", dir_->string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(slurp(*dir_ / "report.json"));
  ASSERT_EQ(report["metrics"].size(), 2u);
  ASSERT_EQ(report["comparisons"].size(), 1u);
  EXPECT_TRUE(report["comparisons"][0].contains("williams"));
  EXPECT_TRUE(report["comparisons"][0].contains("bootstrap"));
  const std::string window = slurp(*dir_ / "window.csv");
  EXPECT_EQ(count_prefix(window, "gecqe,"), 9u);
  EXPECT_EQ(count_prefix(window, "baseline,"), 9u);
  EXPECT_TRUE(fs::exists(*dir_ / "pairwise.csv"));
  EXPECT_TRUE(fs::exists(*dir_ / "tau_difference.csv"));
}

TEST(CliMetaeval, HumanDerivedMetricCorrelatesPerfectly) {
  const auto dir = test::scratch_dir("cli_human_metric");
  const auto judgments = load_judgments(test::data_path("cli/judgments.json"));
  const auto human = human_ranking_trueskill(judgments);
  std::map<std::string, double> mu;
  for (const auto& r : human) mu[r.system] = r.mu;
  std::vector<ScoreRecord> records;
  for (const auto& [key, hyp] : judgments.hypotheses) records.push_back({key.first, key.second, mu[key.second], ScoreMode::filter_free, std::nullopt});
  {
    std::ofstream(dir / "human.tsv") << serialize_scores_tsv(records);
  }
  const auto r = run_cli({"metaeval", "--judgments", test::data_path("cli/judgments.json").string(), "--metric",
                          "human=" + (dir / "human.tsv").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(slurp(dir / "report.json"));
  EXPECT_NEAR(report["metrics"][0]["system"]["spearman"].get<double>(), 1.0, 1e-12);
}

TEST(CliWindow, RejectsOversizedWindow) {
  const auto dir = test::scratch_dir("cli_window");
  const auto r = run_cli({"window", "--judgments", test::data_path("cli/judgments.json").string(), "--metric",
                          "b=" + test::data_path("cli/baseline_scores.tsv").string(), "--window", "40", "--out",
                          dir.string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  const auto ok = run_cli({"pairwise", "--judgments", test::data_path("cli/judgments.json").string(), "--metric",
                           "b=" + test::data_path("cli/baseline_scores.tsv").string(), "--out", dir.string()});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_TRUE(fs::exists(dir / "pairwise.csv"));
}

}  // namespace
}  // namespace gecqe
