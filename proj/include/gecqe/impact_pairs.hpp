#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gecqe/corpus.hpp"
#include "gecqe/encoder.hpp"
#include "gecqe/parallel.hpp"
#include "gecqe/types.hpp"

namespace gecqe {

struct ImpactedEdit {
  Edit edit;
  double impact = 0.0;
};

// An ordered training pair: s_plus has strictly higher summed impact.
struct PairExample {
  Tokens source;
  Tokens s_plus;
  Tokens s_minus;
  double q_plus = 0.0;
  double q_minus = 0.0;

  bool operator==(const PairExample&) const = default;
};

// 1 - cos(correction, source with every edit but `edit` applied), clamped at 0.
// Throws StructuralError when `edit` is not an element of `edits`.
double edit_impact(const SentenceEncoder& encoder, const Tokens& source, const Tokens& correction,
                   const std::vector<Edit>& edits, const Edit& edit);
double edit_impact(const EncoderCheckpoint& checkpoint, const Tokens& source,
                   const Tokens& correction, const std::vector<Edit>& edits, const Edit& edit);

std::vector<ImpactedEdit> edit_impacts(const SentenceEncoder& encoder, const Tokens& source,
                                       const Tokens& correction, const std::vector<Edit>& edits);

struct PairOptions {
  std::size_t pairs_per_sentence = 8;
  std::size_t max_retries = 16;   // draws per pair slot before the slot is skipped
  std::size_t annotator = 0;      // which correction stream to use
  double min_quality_gap = 1e-9;
};

// Edits of the chosen annotator: the M2 edits when present, otherwise the
// output of the aligner.
std::vector<Edit> edits_for(const ParallelPair& pair, std::size_t annotator);

// Up to k pairs. Each slot draws two subsets (independent inclusion, p = 0.5)
// and keeps them when the qualities differ by at least min_quality_gap, the
// surfaces differ, and the same ordered pair was not emitted before.
std::vector<PairExample> generate_pairs(const SentenceEncoder& encoder, const ParallelPair& pair,
                                        const PairOptions& options, std::uint64_t seed);
std::vector<PairExample> generate_pairs(const EncoderCheckpoint& checkpoint,
                                        const ParallelPair& pair, const PairOptions& options,
                                        std::uint64_t seed);

// Training set T: generate_pairs over the corpus with per-sentence seeds
// derive_seed(seed, index), concatenated in corpus order.
std::vector<PairExample> build_pair_dataset(const EncoderCheckpoint& checkpoint,
                                            const std::vector<ParallelPair>& corpus,
                                            const PairOptions& options, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

// JSON lines: {"source":[...],"s_plus":[...],"s_minus":[...],"q_plus":f,"q_minus":f}
std::string serialize_pairs(const std::vector<PairExample>& pairs);
std::vector<PairExample> parse_pairs(std::string_view text);

}  // namespace gecqe
