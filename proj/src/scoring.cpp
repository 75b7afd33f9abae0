#include "gecqe/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>

#include "gecqe/errors.hpp"

namespace gecqe {

std::string_view score_mode_name(ScoreMode mode) {
  return mode == ScoreMode::legacy ? "legacy" : "filter_free";
}

ScoreMode parse_score_mode(std::string_view text) {
  if (text == "filter_free" || text == "filter-free") return ScoreMode::filter_free;
  if (text == "legacy") return ScoreMode::legacy;
  throw ConfigError("unknown scoring mode '" + std::string(text) + "'");
}

double score_filter_free(const EncoderCheckpoint& qe, const Tokens& /*input*/, const Tokens& output) {
  return sigmoid(qe_score(qe, output));
}

double score_legacy(const EncoderCheckpoint& qe, const EncoderCheckpoint& sim, const Tokens& input,
                    const Tokens& output, double theta) {
  if (similarity(sim, input, output) > theta) return sigmoid(qe_score(qe, output));
  return 0.0;
}

std::vector<ScoreRecord> score_corpus(const ScoringSetup& setup, const JudgmentSet& judgments,
                                      Exec exec) {
  if (!setup.qe) throw ConfigError("scoring needs a QE checkpoint");
  if (!setup.qe->qe_head) throw ConfigError("scoring checkpoint has no QE head");
  if (setup.mode == ScoreMode::legacy) {
    if (!setup.similarity) throw ConfigError("legacy scoring needs a similarity checkpoint");
    if (!(setup.theta >= -1.0 && setup.theta <= 1.0)) throw ConfigError("theta must lie in [-1, 1]");
  }

  std::map<std::string, const Sentence*> sources;
  for (const auto& s : judgments.sources) sources.emplace(s.id, &s);
  std::vector<std::string> systems = judgments.systems;
  std::sort(systems.begin(), systems.end());
  std::vector<ScoreRecord> records;
  std::vector<std::pair<const Sentence*, const Sentence*>> inputs;
  for (const auto& [id, src] : sources) {
    for (const auto& system : systems) {
      const Sentence* hyp = judgments.find_hypothesis(id, system);
      if (!hyp) {
        throw SchemaError("missing hypothesis for source '" + id + "' and system '" + system + "'");
      }
      ScoreRecord r;
      r.source_id = id;
      r.system = system;
      r.mode = setup.mode;
      if (setup.mode == ScoreMode::legacy) r.theta = setup.theta;
      records.push_back(std::move(r));
      inputs.emplace_back(src, hyp);
    }
  }

  for_each_index(records.size(), exec, [&](std::size_t i) {
    const auto& [src, hyp] = inputs[i];
    records[i].score = setup.mode == ScoreMode::legacy
                           ? score_legacy(*setup.qe, *setup.similarity, src->tokens, hyp->tokens, setup.theta)
                           : score_filter_free(*setup.qe, src->tokens, hyp->tokens);
  });
  return records;
}

ScoreTable to_table(const std::vector<ScoreRecord>& records) {
  ScoreTable table;
  for (const auto& r : records) table[{r.source_id, r.system}] = r.score;
  return table;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_scores_tsv(const std::vector<ScoreRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.source_id;
    out += '\t';
    out += r.system;
    out += '\t';
    out += format_double(r.score);
    out += '\n';
  }
  return out;
}

ScoreTable parse_scores_tsv(std::string_view text) {
  ScoreTable table;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) throw ParseError("expected 'source_id<TAB>system<TAB>score'", line_no);
    if (line_no == 1 && fields[2] == "score") continue;
    const char* begin = fields[2].c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (fields[2].empty() || end != begin + fields[2].size() || !std::isfinite(value)) {
      throw ParseError("score '" + fields[2] + "' is not a finite number", line_no);
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty source id or system", line_no);
    if (!table.emplace(std::make_pair(fields[0], fields[1]), value).second) {
      throw ParseError("duplicate score for source '" + fields[0] + "' and system '" + fields[1] + "'", line_no);
    }
  }
  return table;
}

std::string serialize_scores_json(const std::vector<ScoreRecord>& records, const ScoreRunInfo& info,
                                  ScoreMode mode, std::optional<double> theta) {
  nlohmann::ordered_json doc;
  doc["mode"] = score_mode_name(mode);
  doc["theta"] = theta ? nlohmann::ordered_json(*theta) : nlohmann::ordered_json(nullptr);
  doc["checkpoint_hash"] = info.checkpoint_hash;
  doc["similarity_hash"] =
      info.similarity_hash ? nlohmann::ordered_json(*info.similarity_hash) : nlohmann::ordered_json(nullptr);
  auto& list = doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    list.push_back({{"source_id", r.source_id}, {"system", r.system}, {"score", r.score}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace gecqe
