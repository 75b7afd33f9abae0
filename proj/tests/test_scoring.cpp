#include <gtest/gtest.h>

#include "gecqe/errors.hpp"
#include "gecqe/scoring.hpp"
#include "test_support.hpp"

namespace gecqe {
namespace {

using test::toks;

Vocab abc() { return Vocab({"<unk>", "a", "b", "c"}); }

TEST(FilterFree, Basics) {
  auto ck = EncoderCheckpoint::initialize({4, 1, 0}, abc());
  ck.add_qe_head();
  EXPECT_EQ(score_filter_free(ck, toks("a"), toks("b c")), 0.5);
  const auto r = test::random_checkpoint(0, abc(), 4, 2, TaxonomyName::binary);
  EXPECT_EQ(score_filter_free(r, toks("a"), toks("b c")), sigmoid(qe_score(r, toks("b c"))));
  EXPECT_EQ(score_filter_free(r, toks("c c c"), toks("b c")), score_filter_free(r, toks("a"), toks("b c")));
  const double x = qe_score(r, toks("a b")), y = qe_score(r, toks("c"));
  EXPECT_EQ(x > y, score_filter_free(r, {}, toks("a b")) > score_filter_free(r, {}, toks("c")));
}

TEST(Legacy, ThresholdBehaviour) {
  const auto qe = test::random_checkpoint(1, abc(), 4, 1, TaxonomyName::binary);
  const auto sim = EncoderCheckpoint::initialize({4, 1, 9}, abc());
  EXPECT_EQ(score_legacy(qe, sim, toks("a b"), toks("a b"), 0.9), sigmoid(qe_score(qe, toks("a b"))));
  EXPECT_EQ(score_legacy(qe, sim, toks("a b"), toks("a b"), 1.0), 0.0);

  auto ortho = EncoderCheckpoint::initialize({2, 0, 0}, Vocab({"<unk>", "x", "y"}));
  ortho.parameters = {0, 0, 1, 0, 0, 1};
  auto qe2 = EncoderCheckpoint::initialize({2, 0, 0}, Vocab({"<unk>", "x", "y"}));
  qe2.add_qe_head();
  EXPECT_EQ(score_legacy(qe2, ortho, toks("x"), toks("y"), 0.9), 0.0);
  EXPECT_EQ(score_legacy(qe2, ortho, toks("x"), toks("y"), -0.5), 0.5);
}

JudgmentSet tiny_judgments() {
  JudgmentSet j;
  j.sources = {Sentence{"s2", toks("a b")}, Sentence{"s1", toks("c")}};
  j.systems = {"Z", "A"};
  for (const auto& s : j.sources) {
    j.hypotheses[{s.id, "Z"}] = Sentence{s.id, toks("a")};
    j.hypotheses[{s.id, "A"}] = Sentence{s.id, toks("b c")};
  }
  return j;
}

TEST(Corpus, OrderAndMissingHypothesis) {
  const auto qe = test::random_checkpoint(2, abc(), 4, 1, TaxonomyName::binary);
  ScoringSetup setup{&qe, nullptr, ScoreMode::filter_free, 0.9};
  auto j = tiny_judgments();
  const auto records = score_corpus(setup, j);
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0].source_id, "s1");
  EXPECT_EQ(records[0].system, "A");
  EXPECT_EQ(records[3].source_id, "s2");
  EXPECT_EQ(records[3].system, "Z");
  EXPECT_EQ(score_corpus(setup, j, Exec::serial), records);
  for (const auto& r : records) {
    EXPECT_FALSE(r.theta);
    EXPECT_GE(r.score, 0.0);
    EXPECT_LE(r.score, 1.0);
  }
  j.hypotheses.erase({"s2", "A"});
  try {
    score_corpus(setup, j);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("'s2'"), std::string::npos);
  }
  ScoringSetup legacy_missing{&qe, nullptr, ScoreMode::legacy, 0.9};
  EXPECT_THROW(score_corpus(legacy_missing, tiny_judgments()), ConfigError);
}

TEST(Corpus, LegacyAtMinusOneEqualsFilterFree) {
  const auto qe = test::random_checkpoint(3, abc(), 4, 1, TaxonomyName::binary);
  const auto sim = EncoderCheckpoint::initialize({4, 1, 5}, abc());
  const auto j = tiny_judgments();
  const auto ff = score_corpus(ScoringSetup{&qe, nullptr, ScoreMode::filter_free, 0.9}, j);
  const auto legacy = score_corpus(ScoringSetup{&qe, &sim, ScoreMode::legacy, -1.0}, j);
  for (std::size_t i = 0; i < ff.size(); ++i) EXPECT_EQ(ff[i].score, legacy[i].score);
  EXPECT_EQ(*legacy[0].theta, -1.0);
}

TEST(Tsv, RoundTripAndErrors) {
  const auto qe = test::random_checkpoint(4, abc(), 4, 1, TaxonomyName::binary);
  const auto records = score_corpus(ScoringSetup{&qe, nullptr, ScoreMode::filter_free, 0.9}, tiny_judgments());
  const auto table = parse_scores_tsv(serialize_scores_tsv(records));
  EXPECT_EQ(table, to_table(records));
  EXPECT_EQ(parse_scores_tsv("source_id\tsystem\tscore\ns\tA\t0.25\n").at({"s", "A"}), 0.25);
  try {
    parse_scores_tsv("s\tA\t0.1\ns\tB\tnope\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_scores_tsv("s\tA\n"), ParseError);
  EXPECT_THROW(parse_scores_tsv("s\tA\t1\ns\tA\t2\n"), ParseError);
  const std::string json = serialize_scores_json(records, ScoreRunInfo{"abc", std::nullopt}, ScoreMode::filter_free,
                                                 std::nullopt);
  EXPECT_NE(json.find("\"checkpoint_hash\": \"abc\""), std::string::npos);
  EXPECT_THROW(parse_score_mode("fuzzy"), ConfigError);
}

}  // namespace
}  // namespace gecqe
