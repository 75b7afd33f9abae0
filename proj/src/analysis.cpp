#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gecqe/errors.hpp"
#include "gecqe/metaeval.hpp"

namespace gecqe {

std::vector<WindowRow> window_analysis(const SystemRanking& metric, const SystemRanking& human,
                                       std::size_t window) {
  if (window < 2) throw ConfigError("window size must be at least 2");
  if (window > human.size()) {
    throw ConfigError("window size " + std::to_string(window) + " exceeds the " +
                      std::to_string(human.size()) + " ranked systems");
  }
  std::map<std::string, double> metric_mu;
  for (const auto& r : metric) metric_mu[r.system] = r.mu;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<WindowRow> rows;
  for (std::size_t start = 0; start + window <= human.size(); ++start) {
    std::vector<double> xs, ys;
    for (std::size_t k = start; k < start + window; ++k) {
      auto it = metric_mu.find(human[k].system);
      if (it == metric_mu.end()) throw SchemaError("metric ranking lacks system '" + human[k].system + "'");
      xs.push_back(it->second);
      ys.push_back(human[k].mu);
    }
    WindowRow row{start + 1, nan, nan};
    try {
      row.pearson = pearson(xs, ys);
    } catch (const std::domain_error&) {
    }
    try {
      row.spearman = spearman(xs, ys);
    } catch (const std::domain_error&) {
    }
    rows.push_back(row);
  }
  return rows;
}

double RankCell::agreement() const {
  if (empty()) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(concordant) / static_cast<double>(count);
}

double RankCell::tau() const {
  if (empty()) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * agreement() - 1.0;
}

RankGroupMatrix pairwise_rank_groups(const ScoreTable& scores, const JudgmentSet& judgments,
                                     std::size_t n_systems) {
  const auto& systems = judgments.systems;
  if (n_systems != systems.size()) {
    throw ConfigError("rank-group matrix size " + std::to_string(n_systems) + " does not match the " +
                      std::to_string(systems.size()) + " judged systems");
  }
  RankGroupMatrix out;
  out.n_systems = n_systems;
  out.cells.assign(n_systems, std::vector<RankCell>(n_systems));

  // Per source: metric rank of every system (0 = best), ties by system name.
  std::map<std::string, std::map<std::string, std::size_t>> ranks;
  std::vector<std::string> by_name = systems;
  std::sort(by_name.begin(), by_name.end());
  for (const auto& source : judgments.sources) {
    std::vector<std::pair<std::string, double>> row;
    for (const auto& s : by_name) {
      auto it = scores.find({source.id, s});
      if (it == scores.end()) {
        throw SchemaError("incomplete scores: no score for source '" + source.id + "' and system '" + s + "'");
      }
      row.emplace_back(s, it->second);
    }
    std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    bool tie = false;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (std::abs(row[k].second - row[k - 1].second) < 1e-9) tie = true;
    }
    if (tie) ++out.tie_broken_sources;
    auto& r = ranks[source.id];
    for (std::size_t k = 0; k < row.size(); ++k) r[row[k].first] = k;
  }

  for (const auto& j : judgments.human_pairwise) {
    if (j.verdict == Verdict::tie) continue;
    auto src = ranks.find(j.source);
    if (src == ranks.end()) throw SchemaError("judgment refers to unknown source '" + j.source + "'");
    const auto ra = src->second.find(j.a);
    const auto rb = src->second.find(j.b);
    if (ra == src->second.end() || rb == src->second.end()) {
      throw SchemaError("judgment on source '" + j.source + "' refers to an unknown system");
    }
    const std::size_t lo = std::min(ra->second, rb->second);
    const std::size_t hi = std::max(ra->second, rb->second);
    if (lo == hi) continue;
    RankCell& cell = out.cells[lo][hi];
    ++cell.count;
    const double d = scores.at({j.source, j.a}) - scores.at({j.source, j.b});
    const bool concordant = std::abs(d) >= 1e-9 && (d > 0) == (j.verdict == Verdict::a_better);
    if (concordant) {
      ++cell.concordant;
    } else {
      ++cell.discordant;
    }
  }
  return out;
}

std::vector<std::vector<std::optional<double>>> tau_difference(const RankGroupMatrix& a,
                                                               const RankGroupMatrix& b) {
  if (a.n_systems != b.n_systems) throw std::invalid_argument("rank-group matrices differ in size");
  std::vector<std::vector<std::optional<double>>> out(a.n_systems,
                                                      std::vector<std::optional<double>>(a.n_systems));
  for (std::size_t i = 0; i < a.n_systems; ++i) {
    for (std::size_t k = i + 1; k < a.n_systems; ++k) {
      const RankCell& x = a.cells[i][k];
      const RankCell& y = b.cells[i][k];
      if (x.empty() || y.empty()) continue;
      out[i][k] = x.tau() - y.tau();
    }
  }
  return out;
}

}  // namespace gecqe
