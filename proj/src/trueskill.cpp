#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>

#include "gecqe/errors.hpp"
#include "gecqe/metaeval.hpp"
#include "gecqe/random.hpp"

namespace gecqe {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// Mean and variance corrections for a win with performance gap t and margin e.
void win_terms(double t, double e, double& v, double& w) {
  const double x = t - e;
  const double denom = cdf(x);
  if (x < -30.0 || denom <= 0.0) {
    // Mills-ratio asymptote; Phi(x) underflows long before this diverges.
    const double x2 = x * x;
    v = -x / (1.0 - 1.0 / x2 + 3.0 / (x2 * x2));
  } else {
    v = pdf(x) / denom;
  }
  w = v * (v + x);
}

void draw_terms(double t, double e, double& v, double& w) {
  const double abs_t = std::abs(t);
  const double a = e - abs_t;
  const double b = -e - abs_t;
  const double denom = cdf(a) - cdf(b);
  if (denom <= 0.0) {
    v = (t < 0 ? -1.0 : 1.0) * a;
    w = 1.0;
    return;
  }
  const double v_abs = (pdf(b) - pdf(a)) / denom;
  v = (t < 0 ? -1.0 : 1.0) * v_abs;
  w = v_abs * v_abs + (a * pdf(a) - b * pdf(b)) / denom;
}

}  // namespace

void trueskill_update(Rating& a, Rating& b, Verdict verdict, const TrueSkillParams& params) {
  if (verdict == Verdict::b_better) {
    trueskill_update(b, a, Verdict::a_better, params);
    return;
  }
  const double var_a = a.sigma * a.sigma + params.tau * params.tau;
  const double var_b = b.sigma * b.sigma + params.tau * params.tau;
  const double c2 = 2.0 * params.beta * params.beta + var_a + var_b;
  const double c = std::sqrt(c2);
  const boost::math::normal_distribution<double> standard;
  const double margin = boost::math::quantile(standard, (params.draw_probability + 1.0) / 2.0) *
                        std::sqrt(2.0) * params.beta;
  const double t = (a.mu - b.mu) / c;
  const double e = margin / c;
  double v = 0.0, w = 0.0;
  if (verdict == Verdict::a_better) {
    win_terms(t, e, v, w);
  } else {
    draw_terms(t, e, v, w);
  }
  w = std::clamp(w, 0.0, 1.0 - 1e-12);
  a.mu += var_a / c * v;
  b.mu -= var_b / c * v;
  a.sigma = std::sqrt(var_a * (1.0 - var_a / c2 * w));
  b.sigma = std::sqrt(var_b * (1.0 - var_b / c2 * w));
}

SystemRanking trueskill_rank(const std::vector<std::string>& systems,
                             const std::vector<Outcome>& outcomes, const TrueSkillParams& params) {
  if (outcomes.empty()) throw StructuralError("TrueSkill needs at least one outcome");
  if (params.passes < 1) throw ConfigError("TrueSkill needs at least one pass");
  std::map<std::string, Rating> ratings;
  for (const auto& s : systems) {
    if (!ratings.emplace(s, Rating{params.mu0, params.sigma0}).second) {
      throw StructuralError("duplicate system '" + s + "'");
    }
  }
  std::vector<const Outcome*> order;
  order.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    for (const auto* name : {&o.a, &o.b}) {
      if (!ratings.count(*name)) throw StructuralError("outcome refers to unknown system '" + *name + "'");
    }
    if (o.a == o.b) throw StructuralError("outcome pits system '" + o.a + "' against itself");
    order.push_back(&o);
  }
  if (params.shuffle_seed) {
    Rng rng(*params.shuffle_seed);
    rng.shuffle(order);
  }
  for (std::size_t pass = 0; pass < params.passes; ++pass) {
    for (const Outcome* o : order) trueskill_update(ratings[o->a], ratings[o->b], o->verdict, params);
  }
  SystemRanking out;
  for (const auto& s : systems) out.push_back(RankedSystem{s, ratings[s].mu, ratings[s].sigma});
  std::stable_sort(out.begin(), out.end(), [](const RankedSystem& x, const RankedSystem& y) { return x.mu > y.mu; });
  return out;
}

std::vector<Outcome> metric_outcomes(const ScoreTable& scores, const JudgmentSet& judgments) {
  std::vector<Outcome> out;
  const auto& systems = judgments.systems;
  for (const auto& source : judgments.sources) {
    std::vector<double> row;
    for (const auto& s : systems) {
      auto it = scores.find({source.id, s});
      if (it == scores.end()) {
        throw SchemaError("no score for source '" + source.id + "' and system '" + s + "'");
      }
      row.push_back(it->second);
    }
    for (std::size_t i = 0; i < systems.size(); ++i) {
      for (std::size_t j = i + 1; j < systems.size(); ++j) {
        const double d = row[i] - row[j];
        const Verdict v = std::abs(d) < 1e-9 ? Verdict::tie : (d > 0 ? Verdict::a_better : Verdict::b_better);
        out.push_back(Outcome{systems[i], systems[j], v});
      }
    }
  }
  return out;
}

SystemRanking metric_ranking_trueskill(const ScoreTable& scores, const JudgmentSet& judgments,
                                       const TrueSkillParams& params) {
  return trueskill_rank(judgments.systems, metric_outcomes(scores, judgments), params);
}

SystemRanking human_ranking_trueskill(const JudgmentSet& judgments, const TrueSkillParams& params) {
  std::vector<Outcome> outcomes;
  outcomes.reserve(judgments.human_pairwise.size());
  for (const auto& j : judgments.human_pairwise) outcomes.push_back(Outcome{j.a, j.b, j.verdict});
  return trueskill_rank(judgments.systems, outcomes, params);
}

}  // namespace gecqe
