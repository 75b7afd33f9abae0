#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gecqe/types.hpp"

namespace gecqe {

enum class TaxonomyName { binary, op4, pos25, full55 };

std::string_view taxonomy_name(TaxonomyName name);
TaxonomyName parse_taxonomy_name(std::string_view text);

// Token-level GED label inventory. Index 0 is always "CORRECT".
class Taxonomy {
 public:
  static const Taxonomy& get(TaxonomyName name);

  TaxonomyName name() const { return name_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  // Label index for a typed edit. Throws StructuralError when the edit type
  // has no entry (pos25/full55 only).
  std::size_t label_for(const Edit& edit) const;

 private:
  Taxonomy(TaxonomyName name, std::vector<std::string> labels);

  TaxonomyName name_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

// The 24 error categories of the pos25 taxonomy, and the categories that
// combine with all three operations in full55 (the rest are replacement-only).
const std::vector<std::string>& error_categories();
const std::vector<std::string>& all_operation_categories();

struct LabeledSentence {
  Tokens tokens;
  std::vector<std::size_t> labels;
  TaxonomyName taxonomy = TaxonomyName::binary;

  bool operator==(const LabeledSentence&) const = default;
};

struct ProjectOptions {
  // An insertion into an empty source labels this single placeholder token.
  bool empty_source_placeholder = true;
  std::string placeholder = "<empty>";
};

// Delete/substitute spans label their own tokens; an insertion labels the
// token to its right (the last token at sentence end). Span labels take
// precedence over insertion anchors; among insertions the first one wins.
LabeledSentence project_labels(const Tokens& source, const std::vector<Edit>& edits,
                               const Taxonomy& taxonomy, const ProjectOptions& options = {});

// Maps full55 labels onto a coarser taxonomy.
LabeledSentence taxonomy_collapse(const LabeledSentence& full, TaxonomyName target);
std::size_t collapse_label(std::size_t full55_index, TaxonomyName target);

// "token<TAB>label" lines, sentences separated by blank lines.
std::string serialize_labeled(const std::vector<LabeledSentence>& sentences);
std::vector<LabeledSentence> parse_labeled(std::string_view text, TaxonomyName taxonomy);

}  // namespace gecqe
