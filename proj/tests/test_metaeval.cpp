#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "gecqe/errors.hpp"
#include "gecqe/metaeval.hpp"
#include "test_support.hpp"

namespace gecqe {
namespace {

// Values frozen from tests/oracles/trueskill_oracle.py.
TEST(TrueSkill, MatchesReferenceImplementation) {
  Rating a, b;
  trueskill_update(a, b, Verdict::a_better, {});
  EXPECT_NEAR(a.mu, 29.39583169299151, 1e-9);
  EXPECT_NEAR(a.sigma, 7.17147580700922, 1e-9);
  EXPECT_NEAR(b.mu, 20.604168307008482, 1e-9);
  EXPECT_NEAR(b.sigma, 7.17147580700922, 1e-9);

  Rating c, d;
  trueskill_update(c, d, Verdict::tie, {});
  EXPECT_NEAR(c.mu, 25.0, 1e-9);
  EXPECT_NEAR(c.sigma, 6.457515683245051, 1e-9);

  const std::vector<Outcome> seq{{"A", "B", Verdict::a_better}, {"B", "C", Verdict::a_better},
                                 {"A", "C", Verdict::tie},      {"C", "A", Verdict::a_better},
                                 {"B", "A", Verdict::tie}};
  const auto ranking = trueskill_rank({"A", "B", "C"}, seq);
  std::map<std::string, RankedSystem> by;
  for (const auto& r : ranking) by[r.system] = r;
  EXPECT_NEAR(by["A"].mu, 22.80605493794536, 1e-9);
  EXPECT_NEAR(by["A"].sigma, 4.28153565769408, 1e-9);
  EXPECT_NEAR(by["B"].mu, 23.860189022267793, 1e-9);
  EXPECT_NEAR(by["C"].mu, 25.886374005415092, 1e-9);
  EXPECT_NEAR(by["C"].sigma, 4.8727754253371085, 1e-9);
  EXPECT_EQ(ranking[0].system, "C");
}

TEST(TrueSkill, DrawSymmetryAndErrors) {
  std::vector<Outcome> draws(20, Outcome{"A", "B", Verdict::tie});
  const auto r = trueskill_rank({"A", "B"}, draws);
  EXPECT_LT(std::abs(r[0].mu - r[1].mu), 1e-6);
  EXPECT_THROW(trueskill_rank({"A", "B"}, {{"A", "X", Verdict::tie}}), StructuralError);
  EXPECT_THROW(trueskill_rank({"A", "B"}, {}), StructuralError);
}

TEST(TrueSkill, DominanceAndRelabeling) {
  std::vector<Outcome> games;
  for (int i = 0; i < 10; ++i) {
    games.push_back({"A", "B", Verdict::a_better});
    games.push_back({"C", "B", Verdict::b_better});
    games.push_back({"A", "C", Verdict::a_better});
  }
  const auto r = trueskill_rank({"C", "B", "A"}, games);
  EXPECT_EQ(r[0].system, "A");
  EXPECT_EQ(r[1].system, "B");
  EXPECT_EQ(r[2].system, "C");

  std::vector<Outcome> renamed = games;
  const std::map<std::string, std::string> rename{{"A", "x"}, {"B", "y"}, {"C", "z"}};
  for (auto& g : renamed) {
    g.a = rename.at(g.a);
    g.b = rename.at(g.b);
  }
  const auto r2 = trueskill_rank({"z", "y", "x"}, renamed);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r2[i].system, rename.at(r[i].system));
    EXPECT_EQ(r2[i].mu, r[i].mu);
  }
  TrueSkillParams shuffled;
  shuffled.shuffle_seed = 4;
  shuffled.passes = 3;
  EXPECT_EQ(trueskill_rank({"C", "B", "A"}, games, shuffled)[0].system, "A");
}

JudgmentSet three_systems() {
  JudgmentSet j;
  j.sources = {Sentence{"s1", {"x"}}, Sentence{"s2", {"y"}}};
  j.systems = {"A", "B", "C"};
  for (const auto& s : j.sources)
    for (const auto& sys : j.systems) j.hypotheses[{s.id, sys}] = Sentence{s.id, {sys}};
  j.human_pairwise = {{"s1", "A", "B", Verdict::a_better}, {"s1", "B", "C", Verdict::b_better},
                      {"s1", "A", "C", Verdict::tie},      {"s2", "A", "B", Verdict::b_better},
                      {"s2", "C", "B", Verdict::a_better}, {"s2", "A", "C", Verdict::b_better}};
  return j;
}

ScoreTable three_scores() {
  return {{{"s1", "A"}, 0.9}, {{"s1", "B"}, 0.5}, {{"s1", "C"}, 0.1},
          {{"s2", "A"}, 0.2}, {{"s2", "B"}, 0.8}, {{"s2", "C"}, 0.5}};
}

TEST(MetricRanking, DominanceTiesAndMajority) {
  const auto j = three_systems();
  ScoreTable best;
  for (const auto& [k, v] : three_scores()) best[k] = k.second == "C" ? 2.0 : v;
  EXPECT_EQ(metric_ranking_trueskill(best, j)[0].system, "C");

  ScoreTable flat;
  for (const auto& [k, v] : three_scores()) flat[k] = 0.3;
  const auto r = metric_ranking_trueskill(flat, j);
  EXPECT_LT(r.front().mu - r.back().mu, 1e-6);

  // Pairwise majority over both sources: B beats C twice, A splits with B and with C.
  // Expected order from the win counts: B (3 wins), A (2), C (1).
  const auto ranked = metric_ranking_trueskill(three_scores(), j);
  EXPECT_EQ(ranked[0].system, "B");
  EXPECT_EQ(ranked[2].system, "C");
  EXPECT_EQ(metric_outcomes(three_scores(), j).size(), 6u);
}

TEST(Correlation, FixtureVectorsMatchScipy) {
  // Frozen from tests/oracles/stats_oracle.py.
  struct Case {
    std::vector<double> x, y;
    double r, rho, tau;
  };
  const std::vector<Case> cases{
      {{1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}, 1.0, 1.0, 1.0},
      {{1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}, -1.0, -1.0, -1.0},
      {{1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}, 0.8, 0.8, 0.6},
      {{0.5, 1.5, 2.0, 3.25, 4.0, 7.5}, {1.0, 0.0, 2.5, 2.5, 3.0, 9.0}, 0.9456439747597367, 0.9276336570439175,
       0.8280786712108251},
      {{1, 1, 2, 2, 3, 3}, {1, 2, 1, 3, 2, 3}, 0.5, 0.5, 0.41666666666666674},
      {{3.1, -2.0, 0.0, 4.4, 1.7}, {0.2, -1.0, 0.1, 0.9, 0.4}, 0.9076366493665178, 0.9, 0.8},
      {{10, 20, 30, 40}, {1, 3, 2, 4}, 0.8, 0.8, 0.6666666666666669},
      {{1, 2, 2, 2, 5, 6, 7}, {7, 6, 6, 3, 2, 2, 1}, -0.8876232895748114, -0.9624354790229066,
       -0.9192547197409878},
      {{0.9, 0.8, 0.75, 0.6, 0.55, 0.5, 0.3, 0.2}, {0.85, 0.9, 0.6, 0.65, 0.4, 0.5, 0.35, 0.1},
       0.9321753227614784, 0.9285714285714287, 0.7857142857142856},
      {{2, 7, 1, 8, 2, 8, 1, 8, 2, 8}, {3, 1, 4, 1, 5, 9, 2, 6, 5, 3}, 0.10492284287735876, 0.13471506281091267,
       0.13041013273932525},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(pearson(c.x, c.y), c.r, 1e-12);
    EXPECT_NEAR(spearman(c.x, c.y), c.rho, 1e-12);
    EXPECT_NEAR(kendall_tau(c.x, c.y), c.tau, 1e-12);
  }
}

TEST(Correlation, InvariancesAndErrors) {
  const std::vector<double> x{0.3, 1.2, -0.7, 2.2, 0.9}, y{1.0, 0.4, -0.2, 3.3, 0.8};
  std::vector<double> ax, mx;
  for (double v : x) {
    ax.push_back(3.0 * v + 7.0);
    mx.push_back(std::exp(v));
  }
  EXPECT_NEAR(pearson(ax, y), pearson(x, y), 1e-12);
  EXPECT_NEAR(spearman(mx, y), spearman(x, y), 1e-12);
  const std::vector<double> flat{1, 1, 1, 1, 1};
  EXPECT_THROW(pearson(flat, y), std::domain_error);
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2}), std::domain_error);
  EXPECT_EQ(average_ranks(std::vector<double>{3, 1, 3, 2}), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(Agreement, ClosedForms) {
  const auto j = three_systems();
  const auto r = sentence_agreement(three_scores(), j.human_pairwise);
  // 5 non-tied judgments: concordant s1 A>B, s2 B>A, s2 C>A; discordant s1 B/C, s2 C/B.
  EXPECT_EQ(r.total, 5u);
  EXPECT_EQ(r.concordant, 3u);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(r.kendall_tau, 2 * r.accuracy - 1);

  const std::vector<PairwiseJudgment> four{{"s1", "A", "B", Verdict::a_better},
                                           {"s1", "B", "C", Verdict::a_better},
                                           {"s1", "A", "C", Verdict::a_better},
                                           {"s2", "A", "B", Verdict::a_better}};
  const auto q = sentence_agreement(three_scores(), four);
  EXPECT_DOUBLE_EQ(q.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(q.kendall_tau, 0.5);

  std::vector<PairwiseJudgment> agree = four, disagree = four;
  agree.pop_back();
  for (auto& d : disagree) d.verdict = Verdict::b_better;
  disagree.pop_back();
  EXPECT_DOUBLE_EQ(sentence_agreement(three_scores(), agree).kendall_tau, 1.0);
  const auto none = sentence_agreement(three_scores(), disagree);
  EXPECT_DOUBLE_EQ(none.accuracy, 0.0);
  EXPECT_DOUBLE_EQ(none.kendall_tau, -1.0);

  ScoreTable tied = three_scores();
  tied[{"s1", "B"}] = 0.9;
  EXPECT_EQ(sentence_agreement(tied, {{"s1", "A", "B", Verdict::a_better}}).discordant, 1u);
  EXPECT_THROW(sentence_agreement(three_scores(), {{"s9", "A", "B", Verdict::a_better}}), SchemaError);
  EXPECT_THROW(sentence_agreement(three_scores(), {{"s1", "A", "B", Verdict::tie}}), std::domain_error);
}

TEST(Williams, ClosedForm) {
  const auto w = williams_test(0.9, 0.8, 0.7, 12);
  EXPECT_NEAR(w.t, 1.0034138671442119, 1e-9);
  EXPECT_NEAR(w.p_value, 0.17093731108110494, 1e-9);
  EXPECT_NEAR(williams_test(0.8, 0.9, 0.7, 12).t, -w.t, 1e-15);
  EXPECT_NEAR(williams_test(0.8, 0.9, 0.7, 12).p_value, 0.829062688918895, 1e-9);
  const auto z = williams_test(0.6, 0.6, 0.2, 20);
  EXPECT_EQ(z.t, 0.0);
  EXPECT_NEAR(z.p_value, 0.5, 1e-15);
  EXPECT_NEAR(williams_test(0.6, 0.3, 0.4, 30).p_value, 0.045590773729137946, 1e-9);
  EXPECT_THROW(williams_test(1.0, 0.3, 0.4, 30), std::domain_error);
  EXPECT_THROW(williams_test(0.5, 0.3, 0.4, 3), std::domain_error);
}

TEST(Bootstrap, Conventions) {
  const auto j = three_systems();
  const auto s = three_scores();
  EXPECT_EQ(bootstrap_compare(s, s, j.human_pairwise, 200, 1), 1.0);
  ScoreTable oracle = s;  // agrees with every non-tied human verdict
  oracle[{"s1", "C"}] = 0.95;
  oracle[{"s2", "C"}] = 0.99;
  ScoreTable inverse;
  for (const auto& [k, v] : oracle) inverse[k] = -v;
  EXPECT_EQ(sentence_agreement(oracle, j.human_pairwise).accuracy, 1.0);
  EXPECT_EQ(bootstrap_compare(oracle, inverse, j.human_pairwise, 300, 2), 0.0);
  const double p = bootstrap_compare(s, oracle, j.human_pairwise, 500, 3, Exec::serial);
  EXPECT_EQ(bootstrap_compare(s, oracle, j.human_pairwise, 500, 3, Exec::parallel), p);
  EXPECT_THROW(bootstrap_compare(s, s, j.human_pairwise, 99, 1), ConfigError);
}

SystemRanking ranking_of(const std::vector<double>& mus) {
  SystemRanking r;
  for (std::size_t i = 0; i < mus.size(); ++i) r.push_back({"sys" + std::to_string(i), mus[i], 1.0});
  return r;
}

TEST(Window, CountsAndDegenerateCases) {
  std::vector<double> human_mu, metric_mu;
  for (int i = 0; i < 12; ++i) {
    human_mu.push_back(40.0 - i);
    metric_mu.push_back(std::sin(i) + 30.0 - 0.5 * i);
  }
  const auto human = ranking_of(human_mu), metric = ranking_of(metric_mu);
  const auto rows = window_analysis(metric, human, 4);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows.front().start_rank, 1u);
  EXPECT_EQ(rows.back().start_rank, 9u);
  const auto whole = window_analysis(metric, human, 12);
  ASSERT_EQ(whole.size(), 1u);
  EXPECT_NEAR(whole[0].pearson, system_correlation(metric, human).pearson, 1e-15);
  for (const auto& r : window_analysis(human, human, 4)) EXPECT_NEAR(r.spearman, 1.0, 1e-12);
  EXPECT_THROW(window_analysis(metric, human, 1), ConfigError);
  EXPECT_THROW(window_analysis(metric, human, 13), ConfigError);
}

TEST(RankGroups, HandEnumeratedInstance) {
  const auto m = pairwise_rank_groups(three_scores(), three_systems(), 3);
  EXPECT_EQ(m.cells[0][1].count, 2u);
  EXPECT_EQ(m.cells[0][1].concordant, 1u);
  EXPECT_DOUBLE_EQ(m.cells[0][1].tau(), 0.0);
  EXPECT_EQ(m.cells[0][2].count, 1u);
  EXPECT_DOUBLE_EQ(m.cells[0][2].agreement(), 1.0);
  EXPECT_EQ(m.cells[1][2].count, 2u);
  EXPECT_DOUBLE_EQ(m.cells[1][2].agreement(), 0.5);
  EXPECT_EQ(m.tie_broken_sources, 0u);
  EXPECT_THROW(pairwise_rank_groups(three_scores(), three_systems(), 4), ConfigError);
  ScoreTable holes = three_scores();
  holes.erase({"s2", "C"});
  EXPECT_THROW(pairwise_rank_groups(holes, three_systems(), 3), SchemaError);
}

TEST(RankGroups, SelfDifferenceIsZeroAndPerfectMetricAgrees) {
  const auto j = load_judgments(test::data_path("judgments.json"));
  ScoreTable lengths;
  for (const auto& [key, hyp] : j.hypotheses) lengths[key] = -static_cast<double>(hyp.tokens.size());
  const auto m = pairwise_rank_groups(lengths, j, 12);
  for (const auto& row : tau_difference(m, m)) {
    for (const auto& cell : row) {
      if (cell) EXPECT_EQ(*cell, 0.0);
    }
  }
  // A metric built from the human verdicts agrees in every populated cell.
  const auto& t = three_systems();
  ScoreTable perfect = three_scores();
  perfect[{"s1", "C"}] = 0.95;
  perfect[{"s2", "C"}] = 0.99;
  const auto pm = pairwise_rank_groups(perfect, t, 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      if (!pm.cells[a][b].empty()) EXPECT_EQ(pm.cells[a][b].agreement(), 1.0);
}

}  // namespace
}  // namespace gecqe
