#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gecqe/corpus.hpp"
#include "gecqe/parallel.hpp"
#include "gecqe/scoring.hpp"

namespace gecqe {

// ---------------------------------------------------------------------------
// TrueSkill

struct Rating {
  double mu = 25.0;
  double sigma = 25.0 / 3.0;
};

struct TrueSkillParams {
  double mu0 = 25.0;
  double sigma0 = 25.0 / 3.0;
  double beta = 25.0 / 6.0;
  double tau = 25.0 / 300.0;
  double draw_probability = 0.10;
  std::size_t passes = 1;
  // When set, outcomes are shuffled with this seed before the first pass.
  std::optional<std::uint64_t> shuffle_seed;
};

struct Outcome {
  std::string a;
  std::string b;
  Verdict verdict = Verdict::tie;
};

struct RankedSystem {
  std::string system;
  double mu = 0.0;
  double sigma = 0.0;
};

// Ordered by mu descending; equal mu keeps the input system order.
using SystemRanking = std::vector<RankedSystem>;

// Updates both ratings for one two-player game between a and b.
void trueskill_update(Rating& a, Rating& b, Verdict verdict, const TrueSkillParams& params);

SystemRanking trueskill_rank(const std::vector<std::string>& systems,
                             const std::vector<Outcome>& outcomes,
                             const TrueSkillParams& params = {});

// Per source, every system pair is a game: the higher score wins, scores
// within 1e-9 draw.
std::vector<Outcome> metric_outcomes(const ScoreTable& scores, const JudgmentSet& judgments);
SystemRanking metric_ranking_trueskill(const ScoreTable& scores, const JudgmentSet& judgments,
                                       const TrueSkillParams& params = {});
SystemRanking human_ranking_trueskill(const JudgmentSet& judgments,
                                      const TrueSkillParams& params = {});

// ---------------------------------------------------------------------------
// Correlations and agreement

// Throws std::domain_error for size mismatch, fewer than two points, or a
// constant input.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
// Kendall tau-b.
double kendall_tau(std::span<const double> x, std::span<const double> y);
// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> x);

struct SystemCorrelation {
  double pearson = 0.0;
  double spearman = 0.0;
  std::size_t n = 0;
};

// Correlation of metric and human mu over the systems of `human`.
SystemCorrelation system_correlation(const SystemRanking& metric, const SystemRanking& human);

struct SentenceAgreement {
  double accuracy = 0.0;
  double kendall_tau = 0.0;
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::size_t total = 0;  // judged pairs after dropping human ties
};

// Human ties are dropped. A metric tie (|difference| < 1e-9) is discordant.
SentenceAgreement sentence_agreement(const ScoreTable& scores,
                                     const std::vector<PairwiseJudgment>& human);

struct WilliamsResult {
  double t = 0.0;
  double p_value = 0.0;  // one-tailed, Student t with n - 3 df
};

// Tests whether r12 > r13 given r23, for correlations sharing variable 1.
WilliamsResult williams_test(double r12, double r13, double r23, std::size_t n);

// Fraction of resamples in which metric b's accuracy is >= metric a's.
double bootstrap_compare(const ScoreTable& metric_a, const ScoreTable& metric_b,
                         const std::vector<PairwiseJudgment>& human, std::size_t iterations,
                         std::uint64_t seed, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Analyses

struct WindowRow {
  std::size_t start_rank = 0;  // 1-based rank in the human ranking
  double pearson = 0.0;        // NaN when undefined on the window
  double spearman = 0.0;
};

// Windows over human ranks x..x+w-1, metric system scores are the metric mu.
std::vector<WindowRow> window_analysis(const SystemRanking& metric, const SystemRanking& human,
                                       std::size_t window);

struct RankCell {
  std::size_t count = 0;
  std::size_t concordant = 0;
  std::size_t discordant = 0;

  bool empty() const { return count == 0; }
  double agreement() const;  // NaN when empty
  double tau() const;        // NaN when empty
};

// cells[a][b] for metric ranks a < b (0-based; rank 0 is the best hypothesis).
struct RankGroupMatrix {
  std::size_t n_systems = 0;
  std::vector<std::vector<RankCell>> cells;
  // Sources where equal metric scores were ordered by system name.
  std::size_t tie_broken_sources = 0;
};

RankGroupMatrix pairwise_rank_groups(const ScoreTable& scores, const JudgmentSet& judgments,
                                     std::size_t n_systems);

// Cell-wise tau(a) - tau(b); nullopt where either cell is empty.
std::vector<std::vector<std::optional<double>>> tau_difference(const RankGroupMatrix& a,
                                                               const RankGroupMatrix& b);

}  // namespace gecqe
