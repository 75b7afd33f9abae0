#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "gecqe/tagger.hpp"
#include "gecqe/types.hpp"

namespace gecqe {

struct AlignCosts {
  double insert = 1.0;
  double remove = 1.0;
  double substitute_base = 1.0;
  double case_only = 0.1;
  // Ties between path costs closer than this are resolved by operation
  // priority: match > substitute > delete > insert.
  double tie_epsilon = 1e-9;
};

// Levenshtein distance over bytes, divided by the longer length. 0 for two
// empty strings.
double normalized_char_distance(std::string_view a, std::string_view b);
bool differs_only_by_case(std::string_view a, std::string_view b);
double substitution_cost(std::string_view a, std::string_view b, const AlignCosts& costs);

enum class AlignOpKind { match, substitute, remove, insert };

// One alignment cell. For insert, src is the source position the target token
// is inserted before; for remove, tgt is the current target position.
struct AlignOp {
  AlignOpKind kind;
  std::size_t src;
  std::size_t tgt;
  double cost;
};

struct AlignmentTrace {
  Tokens source;
  Tokens target;
  std::vector<AlignOp> ops;
  double cost = 0.0;
};

AlignmentTrace align_tokens(const Tokens& source, const Tokens& target,
                            const AlignCosts& costs = {});
inline AlignmentTrace align_tokens(const Sentence& source, const Sentence& target,
                                   const AlignCosts& costs = {}) {
  return align_tokens(source.tokens, target.tokens, costs);
}

// Groups non-match cells into edits. Within a non-match run, consecutive
// substitutions form one edit and consecutive insert/delete cells form
// another; the boundary between the two kinds starts a new edit. Returned
// edits are unclassified (empty etype).
std::vector<Edit> extract_edits(const AlignmentTrace& trace);

// Throws StructuralError when two edits overlap on the source, including two
// insertions at the same point or an insertion strictly inside another span.
void check_non_overlapping(const std::vector<Edit>& edits);

// Sorted, non-overlapping, every edit satisfies its operation invariant and
// lies within the source bounds.
bool is_canonical_edit_set(const std::vector<Edit>& edits, std::size_t source_length);

// Applies any subset of a canonical edit set. Order of the input does not
// matter; overlapping edits throw StructuralError.
Tokens apply_edits(const Tokens& source, const std::vector<Edit>& edits);
inline Sentence apply_edits(const Sentence& source, const std::vector<Edit>& edits) {
  return Sentence{source.id, apply_edits(source.tokens, edits)};
}

// Typed error label: operation prefix plus category ("R:SPELL", "U:OTHER").
std::string classify_edit(const Edit& edit, const PosTagger& tagger);

// align + extract + classify with the given tagger.
std::vector<Edit> extract_typed_edits(const Tokens& source, const Tokens& target,
                                      const PosTagger& tagger, const AlignCosts& costs = {});

}  // namespace gecqe
