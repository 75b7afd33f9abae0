#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gecqe/errors.hpp"
#include "gecqe/metaeval.hpp"
#include "gecqe/random.hpp"

namespace gecqe {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::domain_error("correlation inputs differ in length");
  if (x.size() < 2) throw std::domain_error("correlation needs at least two points");
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::domain_error("correlation of a constant vector is undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0, pairs = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++pairs;
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0.0) ++tied_x;
      if (dy == 0.0) ++tied_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom = std::sqrt(static_cast<double>(pairs - tied_x) * static_cast<double>(pairs - tied_y));
  if (denom == 0.0) throw std::domain_error("correlation of a constant vector is undefined");
  return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

SystemCorrelation system_correlation(const SystemRanking& metric, const SystemRanking& human) {
  std::map<std::string, double> metric_mu;
  for (const auto& r : metric) metric_mu[r.system] = r.mu;
  std::vector<double> xs, ys;
  for (const auto& r : human) {
    auto it = metric_mu.find(r.system);
    if (it == metric_mu.end()) throw SchemaError("metric ranking lacks system '" + r.system + "'");
    xs.push_back(it->second);
    ys.push_back(r.mu);
  }
  return SystemCorrelation{pearson(xs, ys), spearman(xs, ys), xs.size()};
}

namespace {

double lookup(const ScoreTable& scores, const std::string& source, const std::string& system) {
  auto it = scores.find({source, system});
  if (it == scores.end()) {
    throw SchemaError("no score for source '" + source + "' and system '" + system + "'");
  }
  return it->second;
}

// 1 when the metric strictly agrees with a non-tie human verdict.
bool agrees(const ScoreTable& scores, const PairwiseJudgment& j) {
  const double d = lookup(scores, j.source, j.a) - lookup(scores, j.source, j.b);
  if (std::abs(d) < 1e-9) return false;
  return (d > 0) == (j.verdict == Verdict::a_better);
}

}  // namespace

SentenceAgreement sentence_agreement(const ScoreTable& scores, const std::vector<PairwiseJudgment>& human) {
  SentenceAgreement out;
  for (const auto& j : human) {
    if (j.verdict == Verdict::tie) continue;
    ++out.total;
    if (agrees(scores, j)) {
      ++out.concordant;
    } else {
      ++out.discordant;
    }
  }
  if (out.total == 0) throw std::domain_error("no non-tied human judgments");
  out.accuracy = static_cast<double>(out.concordant) / static_cast<double>(out.total);
  // Equal to (concordant - discordant) / total; this form keeps tau = 2 Acc - 1 exact.
  out.kendall_tau = 2.0 * out.accuracy - 1.0;
  return out;
}

WilliamsResult williams_test(double r12, double r13, double r23, std::size_t n) {
  if (n < 4) throw std::domain_error("Williams test needs n >= 4");
  for (double r : {r12, r13, r23}) {
    if (!(std::abs(r) < 1.0)) throw std::domain_error("Williams test needs correlations in (-1, 1)");
  }
  const double nn = static_cast<double>(n);
  const double k = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
  const double denom_sq =
      2.0 * k * (nn - 1.0) / (nn - 3.0) + (r12 + r13) * (r12 + r13) / 4.0 * std::pow(1.0 - r23, 3.0);
  if (!(denom_sq > 0.0)) throw std::domain_error("correlations do not form a valid correlation matrix");
  WilliamsResult out;
  out.t = (r12 - r13) * std::sqrt((nn - 1.0) * (1.0 + r23)) / std::sqrt(denom_sq);
  const boost::math::students_t_distribution<double> dist(nn - 3.0);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.t));
  return out;
}

double bootstrap_compare(const ScoreTable& metric_a, const ScoreTable& metric_b,
                         const std::vector<PairwiseJudgment>& human, std::size_t iterations,
                         std::uint64_t seed, Exec exec) {
  if (iterations < 100) throw ConfigError("bootstrap needs at least 100 iterations");
  std::vector<unsigned char> agree_a, agree_b;
  for (const auto& j : human) {
    if (j.verdict == Verdict::tie) continue;
    agree_a.push_back(agrees(metric_a, j));
    agree_b.push_back(agrees(metric_b, j));
  }
  const std::size_t m = agree_a.size();
  if (m == 0) throw std::domain_error("no non-tied human judgments");
  std::vector<unsigned char> b_not_worse(iterations, 0);
  for_each_index(iterations, exec, [&](std::size_t it) {
    Rng rng(derive_seed(seed, it));
    std::size_t ca = 0, cb = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = rng.uniform_index(m);
      ca += agree_a[i];
      cb += agree_b[i];
    }
    b_not_worse[it] = cb >= ca;
  });
  const auto hits = std::count(b_not_worse.begin(), b_not_worse.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(iterations);
}

}  // namespace gecqe
