#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gecqe/corpus.hpp"
#include "gecqe/encoder.hpp"
#include "gecqe/parallel.hpp"

namespace gecqe {

enum class ScoreMode { filter_free, legacy };

std::string_view score_mode_name(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view text);

struct ScoreRecord {
  std::string source_id;
  std::string system;
  double score = 0.0;
  ScoreMode mode = ScoreMode::filter_free;
  std::optional<double> theta;  // legacy only

  bool operator==(const ScoreRecord&) const = default;
};

// sigmoid(R(output)). The input sentence does not enter the score.
double score_filter_free(const EncoderCheckpoint& qe, const Tokens& input, const Tokens& output);

// sigmoid(R(output)) when similarity(input, output) > theta, otherwise 0.
double score_legacy(const EncoderCheckpoint& qe, const EncoderCheckpoint& sim, const Tokens& input,
                    const Tokens& output, double theta);

struct ScoringSetup {
  const EncoderCheckpoint* qe = nullptr;
  const EncoderCheckpoint* similarity = nullptr;  // legacy only
  ScoreMode mode = ScoreMode::filter_free;
  double theta = 0.9;
};

// One record per (source, system), ordered by source id then system name.
// Missing hypotheses throw SchemaError naming the hole.
std::vector<ScoreRecord> score_corpus(const ScoringSetup& setup, const JudgmentSet& judgments,
                                      Exec exec = Exec::parallel);

// Scores keyed by (source id, system).
using ScoreTable = std::map<std::pair<std::string, std::string>, double>;

ScoreTable to_table(const std::vector<ScoreRecord>& records);

// "source_id<TAB>system<TAB>score"
std::string serialize_scores_tsv(const std::vector<ScoreRecord>& records);
// Also used for external metrics' score files. Errors name the line.
ScoreTable parse_scores_tsv(std::string_view text);

struct ScoreRunInfo {
  std::string checkpoint_hash;
  std::optional<std::string> similarity_hash;
};

std::string serialize_scores_json(const std::vector<ScoreRecord>& records,
                                  const ScoreRunInfo& info, ScoreMode mode,
                                  std::optional<double> theta);

}  // namespace gecqe
