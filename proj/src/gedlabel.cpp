#include "gecqe/gedlabel.hpp"

#include <algorithm>

#include "gecqe/align.hpp"
#include "gecqe/errors.hpp"

namespace gecqe {

std::string_view taxonomy_name(TaxonomyName name) {
  switch (name) {
    case TaxonomyName::binary: return "binary";
    case TaxonomyName::op4: return "op4";
    case TaxonomyName::pos25: return "pos25";
    case TaxonomyName::full55: return "full55";
  }
  return "binary";
}

TaxonomyName parse_taxonomy_name(std::string_view text) {
  for (auto n : {TaxonomyName::binary, TaxonomyName::op4, TaxonomyName::pos25, TaxonomyName::full55}) {
    if (taxonomy_name(n) == text) return n;
  }
  throw ConfigError("unknown taxonomy '" + std::string(text) + "'");
}

const std::vector<std::string>& error_categories() {
  static const std::vector<std::string> cats{
      "ADJ",   "ADJ:FORM", "ADV",   "CONJ",  "CONTR",     "DET",       "MORPH",    "NOUN",
      "NOUN:INFL", "NOUN:NUM", "NOUN:POSS", "ORTH", "OTHER", "PART", "PREP", "PRON",
      "PUNCT", "SPELL",    "VERB",  "VERB:FORM", "VERB:INFL", "VERB:SVA", "VERB:TENSE", "WO"};
  return cats;
}

const std::vector<std::string>& all_operation_categories() {
  static const std::vector<std::string> cats{"ADJ",  "ADV",   "CONJ",      "CONTR",     "DET",
                                             "NOUN", "NOUN:POSS", "OTHER", "PART",      "PREP",
                                             "PRON", "PUNCT", "VERB",      "VERB:FORM", "VERB:TENSE"};
  return cats;
}

namespace {

std::vector<std::string> build_labels(TaxonomyName name) {
  std::vector<std::string> labels{"CORRECT"};
  switch (name) {
    case TaxonomyName::binary:
      labels.push_back("INCORRECT");
      break;
    case TaxonomyName::op4:
      labels.insert(labels.end(), {"INS", "DEL", "SUB"});
      break;
    case TaxonomyName::pos25:
      labels.insert(labels.end(), error_categories().begin(), error_categories().end());
      break;
    case TaxonomyName::full55:
      for (const auto& c : all_operation_categories()) labels.push_back("M:" + c);
      for (const auto& c : all_operation_categories()) labels.push_back("U:" + c);
      for (const auto& c : error_categories()) labels.push_back("R:" + c);
      break;
  }
  return labels;
}

// "R:VERB:SVA" -> ('R', "VERB:SVA")
std::pair<char, std::string> split_etype(const std::string& etype) {
  if (etype.size() < 3 || etype[1] != ':') {
    throw StructuralError("malformed edit type '" + etype + "'");
  }
  return {etype[0], etype.substr(2)};
}

std::size_t op4_index(char prefix) {
  switch (prefix) {
    case 'M': return 1;
    case 'U': return 2;
    case 'R': return 3;
  }
  throw StructuralError(std::string("unknown operation prefix '") + prefix + "'");
}

}  // namespace

Taxonomy::Taxonomy(TaxonomyName name, std::vector<std::string> labels)
    : name_(name), labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], i);
}

const Taxonomy& Taxonomy::get(TaxonomyName name) {
  static const Taxonomy binary(TaxonomyName::binary, build_labels(TaxonomyName::binary));
  static const Taxonomy op4(TaxonomyName::op4, build_labels(TaxonomyName::op4));
  static const Taxonomy pos25(TaxonomyName::pos25, build_labels(TaxonomyName::pos25));
  static const Taxonomy full55(TaxonomyName::full55, build_labels(TaxonomyName::full55));
  switch (name) {
    case TaxonomyName::binary: return binary;
    case TaxonomyName::op4: return op4;
    case TaxonomyName::pos25: return pos25;
    case TaxonomyName::full55: return full55;
  }
  return binary;
}

std::optional<std::size_t> Taxonomy::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Taxonomy::label_for(const Edit& edit) const {
  switch (name_) {
    case TaxonomyName::binary:
      return 1;
    case TaxonomyName::op4:
      return op4_index(operation_prefix(edit.operation));
    case TaxonomyName::pos25: {
      const auto [prefix, category] = split_etype(edit.etype);
      if (auto i = index_of(category); i && *i != 0) return *i;
      throw StructuralError("edit type '" + edit.etype + "' has no pos25 label");
    }
    case TaxonomyName::full55: {
      if (auto i = index_of(edit.etype); i && *i != 0) return *i;
      throw StructuralError("edit type '" + edit.etype + "' has no full55 label");
    }
  }
  return 1;
}

LabeledSentence project_labels(const Tokens& source, const std::vector<Edit>& edits,
                               const Taxonomy& taxonomy, const ProjectOptions& options) {
  check_non_overlapping(edits);
  for (const auto& e : edits) {
    if (e.src_span.end > source.size()) {
      throw StructuralError("edit span " + std::to_string(e.src_span.begin) + "-" +
                            std::to_string(e.src_span.end) + " exceeds source length " +
                            std::to_string(source.size()));
    }
  }

  LabeledSentence out;
  out.taxonomy = taxonomy.name();
  out.tokens = source;

  if (source.empty()) {
    if (edits.empty()) return out;
    if (!options.empty_source_placeholder) {
      throw StructuralError("insertion into an empty source with placeholders disabled");
    }
    out.tokens = {options.placeholder};
    out.labels = {taxonomy.label_for(edits.front())};
    return out;
  }

  out.labels.assign(source.size(), 0);
  std::vector<bool> assigned(source.size(), false);
  for (const auto& e : edits) {
    if (e.src_span.empty()) continue;
    const std::size_t label = taxonomy.label_for(e);
    for (std::size_t k = e.src_span.begin; k < e.src_span.end; ++k) {
      out.labels[k] = label;
      assigned[k] = true;
    }
  }
  for (const auto& e : edits) {
    if (!e.src_span.empty()) continue;
    const std::size_t anchor = std::min(e.src_span.begin, source.size() - 1);
    if (assigned[anchor]) continue;
    out.labels[anchor] = taxonomy.label_for(e);
    assigned[anchor] = true;
  }
  return out;
}

std::size_t collapse_label(std::size_t full55_index, TaxonomyName target) {
  const Taxonomy& full = Taxonomy::get(TaxonomyName::full55);
  if (full55_index >= full.size()) {
    throw StructuralError("full55 label index " + std::to_string(full55_index) + " out of range");
  }
  if (full55_index == 0) return 0;
  const auto [prefix, category] = split_etype(full.label(full55_index));
  switch (target) {
    case TaxonomyName::binary: return 1;
    case TaxonomyName::op4: return op4_index(prefix);
    case TaxonomyName::pos25: return *Taxonomy::get(TaxonomyName::pos25).index_of(category);
    case TaxonomyName::full55: return full55_index;
  }
  return full55_index;
}

LabeledSentence taxonomy_collapse(const LabeledSentence& full, TaxonomyName target) {
  if (full.taxonomy != TaxonomyName::full55) {
    throw StructuralError("taxonomy_collapse expects full55 labels");
  }
  LabeledSentence out{full.tokens, {}, target};
  out.labels.reserve(full.labels.size());
  for (auto l : full.labels) out.labels.push_back(collapse_label(l, target));
  return out;
}

std::string serialize_labeled(const std::vector<LabeledSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    const Taxonomy& tax = Taxonomy::get(s.taxonomy);
    if (s.labels.size() != s.tokens.size()) {
      throw StructuralError("labeled sentence has mismatched token and label counts");
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out += s.tokens[i];
      out += '\t';
      out += tax.label(s.labels[i]);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<LabeledSentence> parse_labeled(std::string_view text, TaxonomyName taxonomy) {
  const Taxonomy& tax = Taxonomy::get(taxonomy);
  std::vector<LabeledSentence> out;
  LabeledSentence current{{}, {}, taxonomy};
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      out.push_back(std::move(current));
      current = LabeledSentence{{}, {}, taxonomy};
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError("expected 'token<TAB>label'", line_no);
    }
    const auto label = tax.index_of(line.substr(tab + 1));
    if (!label) {
      throw ParseError("unknown " + std::string(taxonomy_name(taxonomy)) + " label '" +
                           std::string(line.substr(tab + 1)) + "'",
                       line_no);
    }
    current.tokens.emplace_back(line.substr(0, tab));
    current.labels.push_back(*label);
  }
  if (!current.tokens.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace gecqe
