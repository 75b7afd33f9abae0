#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gecqe/corpus.hpp"
#include "gecqe/encoder.hpp"
#include "gecqe/gedlabel.hpp"
#include "gecqe/impact_pairs.hpp"
#include "gecqe/scoring.hpp"
#include "gecqe/training.hpp"

namespace gecqe::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad flags or config
inline constexpr int kExitData = 2;     // malformed or inconsistent input files
inline constexpr int kExitRuntime = 3;  // failures while running

// How M2 edit types are turned into GED labels.
enum class EditTypes {
  reclassify,  // always re-derive the type with the built-in classifier
  keep,        // trust the file's type; classify only UNK or empty types
};

struct MetricSource {
  std::string name;
  // Score TSV; unset means this toolkit's own scores.tsv in the output dir.
  std::optional<std::filesystem::path> scores;
};

struct ScoringOptions {
  ScoreMode mode = ScoreMode::filter_free;
  double theta = 0.9;
  std::optional<std::filesystem::path> checkpoint;             // default <out>/qe.json
  std::optional<std::filesystem::path> similarity_checkpoint;  // legacy only
  std::uint64_t similarity_seed = 0;  // fresh encoder when no similarity checkpoint is given
};

struct AnalysisOptions {
  std::size_t window = 4;
  std::size_t bootstrap_iterations = 1000;
  std::uint64_t bootstrap_seed = 0;
  std::optional<std::uint64_t> trueskill_seed;
  std::size_t trueskill_passes = 1;
};

struct RunConfig {
  std::filesystem::path output_dir = "out";

  std::vector<std::filesystem::path> ged_train;
  std::vector<std::filesystem::path> ged_dev;
  std::optional<std::filesystem::path> qe_corpus;  // split into train/dev/devtest
  SplitSpec qe_split;
  bool add_qe_train_to_ged = false;

  TaxonomyName taxonomy = TaxonomyName::binary;
  GedDevMetric ged_metric = GedDevMetric::f05;
  EditTypes edit_types = EditTypes::reclassify;

  EncoderConfig encoder;
  std::size_t min_count = 1;
  TrainConfig ged{5, 0.1, 16, 0, true};
  TrainConfig qe{10, 0.1, 16, 0, true};
  PairOptions pairs;
  std::uint64_t pair_seed = 0;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool parallel_seeds = false;

  ScoringOptions scoring;
  std::optional<std::filesystem::path> judgments;
  std::vector<MetricSource> metrics;
  AnalysisOptions analysis;
};

// Relative paths are resolved against base_dir. Unknown keys are rejected.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// GED training data from a parallel corpus (first annotator).
std::vector<LabeledSentence> label_corpus(const std::vector<ParallelPair>& pairs,
                                          TaxonomyName taxonomy, EditTypes edit_types,
                                          std::size_t annotator = 0);

// Entry point of the gecqe binary; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gecqe::cli
