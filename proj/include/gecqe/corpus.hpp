#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gecqe/types.hpp"

namespace gecqe {

// A source sentence with one correction per annotator. annotator_edits is
// present for M2 input; applying annotator_edits[i] to source yields
// corrections[i].
struct ParallelPair {
  Sentence source;
  std::vector<Sentence> corrections;
  std::optional<std::vector<std::vector<Edit>>> annotator_edits;

  bool operator==(const ParallelPair&) const = default;
};

// M2 blocks: "S <tokens>" followed by "A <start> <end>|||<type>|||<replacement>|||
// <required>|||<comment>|||<annotator>" lines, blocks separated by blank lines.
std::vector<ParallelPair> parse_m2(std::string_view text);

// Writes pairs that carry annotator_edits; pairs without edits are written as
// S-lines only. A "noop" line keeps an edit-free annotator when more than one
// annotator is present.
std::string serialize_m2(const std::vector<ParallelPair>& pairs);

// "source<TAB>correction1[<TAB>correction2...]" per line. Blank lines are skipped.
std::vector<ParallelPair> parse_parallel_tsv(std::string_view text);

// Reads a file and dispatches on extension: ".m2" -> M2, anything else -> TSV.
std::vector<ParallelPair> load_parallel(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

struct SplitSpec {
  std::array<double, 3> ratios{0.8, 0.1, 0.1};  // train, dev, devtest
  std::uint64_t seed = 0;
};

struct DatasetSplit {
  std::vector<ParallelPair> train;
  std::vector<ParallelPair> dev;
  std::vector<ParallelPair> devtest;
};

// Seeded shuffle, then contiguous partition: dev and devtest sizes are
// floor(n * ratio), the remainder goes to train.
DatasetSplit split_dataset(const std::vector<ParallelPair>& pairs, const SplitSpec& spec);

enum class Verdict { a_better, b_better, tie };

struct PairwiseJudgment {
  std::string source;
  std::string a;
  std::string b;
  Verdict verdict = Verdict::tie;
};

// Human judgments over system outputs. Hypotheses are keyed by
// (source id, system name).
struct JudgmentSet {
  std::vector<Sentence> sources;
  std::vector<std::string> systems;
  std::map<std::pair<std::string, std::string>, Sentence> hypotheses;
  std::vector<PairwiseJudgment> human_pairwise;

  const Sentence* find_source(std::string_view id) const;
  const Sentence* find_hypothesis(const std::string& source, const std::string& system) const;
  bool has_system(std::string_view name) const;
};

JudgmentSet parse_judgments(std::string_view json_text);
JudgmentSet load_judgments(const std::filesystem::path& path);
std::string serialize_judgments(const JudgmentSet& set);

}  // namespace gecqe
