#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gecqe {

using Tokens = std::vector<std::string>;

// A pre-tokenized sentence. Tokens never contain whitespace; an empty token
// list is allowed (empty sources and full-deletion corrections occur in M2 data).
struct Sentence {
  std::string id;
  Tokens tokens;

  bool operator==(const Sentence&) const = default;
};

// Splits on ASCII whitespace; runs of whitespace never produce empty tokens.
Tokens split_tokens(std::string_view text);
std::string join_tokens(const Tokens& tokens, std::string_view sep = " ");

// Half-open token index range.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const Span&) const = default;
};

enum class Operation { insert, remove, substitute };

// One-letter prefix used by typed edit labels: M (missing), U (unnecessary),
// R (replacement).
char operation_prefix(Operation op);
std::string_view operation_name(Operation op);

// A span replacement transforming source tokens toward a correction.
// Invariants (checked by is_canonical_edit_set):
//   insert     <=> src_span empty, tgt_tokens non-empty
//   remove     <=> tgt_tokens empty, src_span non-empty
//   substitute <=> both non-empty
struct Edit {
  Span src_span;
  Span tgt_span;
  Operation operation = Operation::substitute;
  std::string etype;  // e.g. "R:SPELL"; empty until classified
  Tokens src_tokens;
  Tokens tgt_tokens;

  bool operator==(const Edit&) const = default;
};

Operation operation_for(const Span& src, const Tokens& tgt_tokens);

}  // namespace gecqe
