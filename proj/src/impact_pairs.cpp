#include "gecqe/impact_pairs.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>

#include "gecqe/align.hpp"
#include "gecqe/errors.hpp"
#include "gecqe/random.hpp"

namespace gecqe {

namespace {

std::size_t index_of_edit(const std::vector<Edit>& edits, const Edit& edit) {
  for (std::size_t i = 0; i < edits.size(); ++i)
    if (edits[i] == edit) return i;
  throw StructuralError("edit " + std::to_string(edit.src_span.begin) + "-" +
                        std::to_string(edit.src_span.end) + " is not part of the edit set");
}

std::vector<Edit> without(const std::vector<Edit>& edits, std::size_t skip) {
  std::vector<Edit> out;
  out.reserve(edits.size());
  for (std::size_t i = 0; i < edits.size(); ++i)
    if (i != skip) out.push_back(edits[i]);
  return out;
}

double impact_at(const SentenceEncoder& encoder, const Tokens& source, const TokenEmbeddings& target,
                 const std::vector<Edit>& edits, std::size_t index) {
  const Tokens partial = apply_edits(source, without(edits, index));
  const TokenEmbeddings emb = encoder.encode(partial);
  return std::max(0.0, 1.0 - cosine(target.pooled, emb.pooled));
}

}  // namespace

double edit_impact(const SentenceEncoder& encoder, const Tokens& source, const Tokens& correction,
                   const std::vector<Edit>& edits, const Edit& edit) {
  const std::size_t index = index_of_edit(edits, edit);
  return impact_at(encoder, source, encoder.encode(correction), edits, index);
}

double edit_impact(const EncoderCheckpoint& checkpoint, const Tokens& source,
                   const Tokens& correction, const std::vector<Edit>& edits, const Edit& edit) {
  return edit_impact(ReferenceEncoder(checkpoint), source, correction, edits, edit);
}

std::vector<ImpactedEdit> edit_impacts(const SentenceEncoder& encoder, const Tokens& source,
                                       const Tokens& correction, const std::vector<Edit>& edits) {
  const TokenEmbeddings target = encoder.encode(correction);
  std::vector<ImpactedEdit> out;
  out.reserve(edits.size());
  for (std::size_t i = 0; i < edits.size(); ++i) {
    out.push_back(ImpactedEdit{edits[i], impact_at(encoder, source, target, edits, i)});
  }
  return out;
}

std::vector<Edit> edits_for(const ParallelPair& pair, std::size_t annotator) {
  if (pair.annotator_edits) {
    if (annotator >= pair.annotator_edits->size()) {
      throw StructuralError("sentence " + pair.source.id + " has no annotator " + std::to_string(annotator));
    }
    return (*pair.annotator_edits)[annotator];
  }
  if (annotator >= pair.corrections.size()) {
    throw StructuralError("sentence " + pair.source.id + " has no annotator " + std::to_string(annotator));
  }
  return extract_edits(align_tokens(pair.source.tokens, pair.corrections[annotator].tokens));
}

std::vector<PairExample> generate_pairs(const SentenceEncoder& encoder, const ParallelPair& pair,
                                        const PairOptions& options, std::uint64_t seed) {
  const std::vector<Edit> edits = edits_for(pair, options.annotator);
  if (edits.empty()) return {};
  const Tokens& source = pair.source.tokens;
  const Tokens correction = apply_edits(source, edits);
  const auto impacts = edit_impacts(encoder, source, correction, edits);

  Rng rng(seed);
  std::set<std::pair<Tokens, Tokens>> emitted;
  std::vector<PairExample> out;
  std::vector<bool> mask_a(edits.size()), mask_b(edits.size());

  auto realize = [&](const std::vector<bool>& mask, double& quality) {
    std::vector<Edit> subset;
    quality = 0.0;
    for (std::size_t i = 0; i < edits.size(); ++i) {
      if (!mask[i]) continue;
      subset.push_back(edits[i]);
      quality += impacts[i].impact;
    }
    return apply_edits(source, subset);
  };

  for (std::size_t slot = 0; slot < options.pairs_per_sentence; ++slot) {
    for (std::size_t attempt = 0; attempt < options.max_retries; ++attempt) {
      for (std::size_t i = 0; i < edits.size(); ++i) mask_a[i] = rng.bernoulli(0.5);
      for (std::size_t i = 0; i < edits.size(); ++i) mask_b[i] = rng.bernoulli(0.5);
      if (mask_a == mask_b) continue;
      double qa = 0.0, qb = 0.0;
      Tokens sa = realize(mask_a, qa);
      Tokens sb = realize(mask_b, qb);
      if (std::abs(qa - qb) < options.min_quality_gap || sa == sb) continue;
      PairExample ex;
      ex.source = source;
      if (qa > qb) {
        ex.s_plus = std::move(sa);
        ex.s_minus = std::move(sb);
        ex.q_plus = qa;
        ex.q_minus = qb;
      } else {
        ex.s_plus = std::move(sb);
        ex.s_minus = std::move(sa);
        ex.q_plus = qb;
        ex.q_minus = qa;
      }
      if (!emitted.emplace(ex.s_plus, ex.s_minus).second) continue;
      out.push_back(std::move(ex));
      break;
    }
  }
  return out;
}

std::vector<PairExample> generate_pairs(const EncoderCheckpoint& checkpoint,
                                        const ParallelPair& pair, const PairOptions& options,
                                        std::uint64_t seed) {
  return generate_pairs(ReferenceEncoder(checkpoint), pair, options, seed);
}

std::vector<PairExample> build_pair_dataset(const EncoderCheckpoint& checkpoint,
                                            const std::vector<ParallelPair>& corpus,
                                            const PairOptions& options, std::uint64_t seed,
                                            Exec exec) {
  const ReferenceEncoder encoder(checkpoint);
  std::vector<std::vector<PairExample>> per_sentence(corpus.size());
  for_each_index(corpus.size(), exec, [&](std::size_t i) {
    per_sentence[i] = generate_pairs(encoder, corpus[i], options, derive_seed(seed, i));
  });
  std::vector<PairExample> out;
  for (auto& v : per_sentence)
    for (auto& p : v) out.push_back(std::move(p));
  return out;
}

std::string serialize_pairs(const std::vector<PairExample>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::json j = {{"source", p.source},
                        {"s_plus", p.s_plus},
                        {"s_minus", p.s_minus},
                        {"q_plus", p.q_plus},
                        {"q_minus", p.q_minus}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<PairExample> parse_pairs(std::string_view text) {
  std::vector<PairExample> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    PairExample p;
    try {
      p.source = j.at("source").get<Tokens>();
      p.s_plus = j.at("s_plus").get<Tokens>();
      p.s_minus = j.at("s_minus").get<Tokens>();
      p.q_plus = j.at("q_plus").get<double>();
      p.q_minus = j.at("q_minus").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed pair: ") + e.what(), line_no);
    }
    if (!(p.q_plus > p.q_minus) || p.s_plus == p.s_minus) {
      throw SchemaError("line " + std::to_string(line_no) +
                        ": pair must have q_plus > q_minus and distinct sentences");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace gecqe
