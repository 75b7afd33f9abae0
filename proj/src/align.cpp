#include "gecqe/align.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>

#include "gecqe/errors.hpp"

namespace gecqe {

double normalized_char_distance(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t diag = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[b.size()]) / static_cast<double>(longest);
}

bool differs_only_by_case(std::string_view a, std::string_view b) {
  return a != b && to_lower_ascii(a) == to_lower_ascii(b);
}

double substitution_cost(std::string_view a, std::string_view b, const AlignCosts& costs) {
  if (a == b) return 0.0;
  if (differs_only_by_case(a, b)) return costs.case_only;
  return costs.substitute_base + normalized_char_distance(to_lower_ascii(a), to_lower_ascii(b));
}

AlignmentTrace align_tokens(const Tokens& source, const Tokens& target, const AlignCosts& costs) {
  const std::size_t n = source.size();
  const std::size_t m = target.size();
  const std::size_t width = m + 1;

  std::vector<double> sub(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) sub[i * m + j] = substitution_cost(source[i], target[j], costs);

  std::vector<double> dp((n + 1) * width);
  for (std::size_t j = 1; j <= m; ++j) dp[j] = dp[j - 1] + costs.insert;
  for (std::size_t i = 1; i <= n; ++i) {
    dp[i * width] = dp[(i - 1) * width] + costs.remove;
    for (std::size_t j = 1; j <= m; ++j) {
      const double diag = dp[(i - 1) * width + j - 1] + sub[(i - 1) * m + j - 1];
      const double del = dp[(i - 1) * width + j] + costs.remove;
      const double ins = dp[i * width + j - 1] + costs.insert;
      dp[i * width + j] = std::min({diag, del, ins});
    }
  }

  AlignmentTrace trace;
  trace.source = source;
  trace.target = target;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const double here = dp[i * width + j];
    auto near = [&](double v) { return std::abs(v - here) <= costs.tie_epsilon; };
    if (i > 0 && j > 0 && near(dp[(i - 1) * width + j - 1] + sub[(i - 1) * m + j - 1])) {
      const double c = sub[(i - 1) * m + j - 1];
      const auto kind = source[i - 1] == target[j - 1] ? AlignOpKind::match : AlignOpKind::substitute;
      trace.ops.push_back(AlignOp{kind, i - 1, j - 1, c});
      --i;
      --j;
    } else if (i > 0 && near(dp[(i - 1) * width + j] + costs.remove)) {
      trace.ops.push_back(AlignOp{AlignOpKind::remove, i - 1, j, costs.remove});
      --i;
    } else {
      trace.ops.push_back(AlignOp{AlignOpKind::insert, i, j - 1, costs.insert});
      --j;
    }
  }
  std::reverse(trace.ops.begin(), trace.ops.end());
  for (const auto& op : trace.ops) trace.cost += op.cost;
  return trace;
}

std::vector<Edit> extract_edits(const AlignmentTrace& trace) {
  std::vector<Edit> edits;
  bool open = false;
  bool open_is_sub = false;
  Span src, tgt;

  auto flush = [&]() {
    if (!open) return;
    Edit e;
    e.src_span = src;
    e.tgt_span = tgt;
    e.src_tokens.assign(trace.source.begin() + src.begin, trace.source.begin() + src.end);
    e.tgt_tokens.assign(trace.target.begin() + tgt.begin, trace.target.begin() + tgt.end);
    e.operation = operation_for(e.src_span, e.tgt_tokens);
    edits.push_back(std::move(e));
    open = false;
  };

  for (const auto& op : trace.ops) {
    if (op.kind == AlignOpKind::match) {
      flush();
      continue;
    }
    const bool is_sub = op.kind == AlignOpKind::substitute;
    if (open && is_sub != open_is_sub) flush();
    if (!open) {
      open = true;
      open_is_sub = is_sub;
      src = Span{op.src, op.src};
      tgt = Span{op.tgt, op.tgt};
    }
    switch (op.kind) {
      case AlignOpKind::substitute:
        src.end = op.src + 1;
        tgt.end = op.tgt + 1;
        break;
      case AlignOpKind::remove:
        src.end = op.src + 1;
        break;
      case AlignOpKind::insert:
        tgt.end = op.tgt + 1;
        break;
      case AlignOpKind::match:
        break;
    }
  }
  flush();
  return edits;
}

namespace {

std::vector<const Edit*> sorted_view(const std::vector<Edit>& edits) {
  std::vector<const Edit*> view;
  view.reserve(edits.size());
  for (const auto& e : edits) view.push_back(&e);
  std::stable_sort(view.begin(), view.end(), [](const Edit* a, const Edit* b) {
    if (a->src_span.begin != b->src_span.begin) return a->src_span.begin < b->src_span.begin;
    return a->src_span.end < b->src_span.end;
  });
  return view;
}

std::string describe(const Edit& e) {
  return std::to_string(e.src_span.begin) + "-" + std::to_string(e.src_span.end);
}

}  // namespace

void check_non_overlapping(const std::vector<Edit>& edits) {
  const auto view = sorted_view(edits);
  std::size_t max_end = 0;
  const Edit* prev = nullptr;
  for (const Edit* e : view) {
    if (e->src_span.begin > e->src_span.end) {
      throw StructuralError("edit span " + describe(*e) + " is reversed");
    }
    if (prev) {
      const bool both_inserts_here = prev->src_span.empty() && e->src_span.empty() &&
                                     prev->src_span.begin == e->src_span.begin;
      if (e->src_span.begin < max_end || both_inserts_here) {
        throw StructuralError("overlapping edits at " + describe(*prev) + " and " + describe(*e));
      }
    }
    max_end = std::max(max_end, e->src_span.end);
    prev = e;
  }
}

bool is_canonical_edit_set(const std::vector<Edit>& edits, std::size_t source_length) {
  for (std::size_t k = 0; k < edits.size(); ++k) {
    const Edit& e = edits[k];
    if (e.src_span.begin > e.src_span.end || e.src_span.end > source_length) return false;
    if (e.src_span.empty() && e.tgt_tokens.empty()) return false;
    if (e.operation != operation_for(e.src_span, e.tgt_tokens)) return false;
    if (e.src_tokens.size() != e.src_span.size()) return false;
    if (e.tgt_tokens.size() != e.tgt_span.size()) return false;
    if (k > 0) {
      const Edit& p = edits[k - 1];
      if (p.src_span.begin > e.src_span.begin) return false;
      if (p.src_span.begin == e.src_span.begin && p.src_span.end > e.src_span.end) return false;
    }
  }
  try {
    check_non_overlapping(edits);
  } catch (const StructuralError&) {
    return false;
  }
  return true;
}

Tokens apply_edits(const Tokens& source, const std::vector<Edit>& edits) {
  check_non_overlapping(edits);
  const auto view = sorted_view(edits);
  Tokens out;
  out.reserve(source.size() + 4);
  std::size_t pos = 0;
  for (const Edit* e : view) {
    if (e->src_span.end > source.size()) {
      throw StructuralError("edit span " + describe(*e) + " exceeds source length " +
                            std::to_string(source.size()));
    }
    if (e->src_tokens.size() == e->src_span.size() &&
        !std::equal(e->src_tokens.begin(), e->src_tokens.end(),
                    source.begin() + static_cast<std::ptrdiff_t>(e->src_span.begin))) {
      throw StructuralError("edit " + describe(*e) + " does not match the source tokens");
    }
    out.insert(out.end(), source.begin() + static_cast<std::ptrdiff_t>(pos),
               source.begin() + static_cast<std::ptrdiff_t>(e->src_span.begin));
    out.insert(out.end(), e->tgt_tokens.begin(), e->tgt_tokens.end());
    pos = e->src_span.end;
  }
  out.insert(out.end(), source.begin() + static_cast<std::ptrdiff_t>(pos), source.end());
  return out;
}

namespace {

bool is_inflection_pair(const std::string& a, const std::string& b) {
  auto one_way = [](const std::string& base, const std::string& form) {
    if (form == base + "s" || form == base + "es") return true;
    return base.size() > 1 && base.back() == 'y' &&
           form == base.substr(0, base.size() - 1) + "ies";
  };
  return one_way(a, b) || one_way(b, a);
}

bool is_verb_form_pair(const std::string& a, const std::string& b) {
  static constexpr std::array<std::string_view, 4> endings{"ing", "ed", "en", "d"};
  auto stem = [](const std::string& w) {
    for (auto suffix : endings) {
      if (w.size() > suffix.size() + 2 && w.ends_with(suffix)) return w.substr(0, w.size() - suffix.size());
    }
    return w;
  };
  const std::string sa = stem(a), sb = stem(b);
  if (sa == a && sb == b) return false;
  const std::size_t n = std::min(sa.size(), sb.size());
  return n >= 3 && sa.compare(0, n, sb, 0, n) == 0;
}

bool in_pairs(const std::string& a, const std::string& b,
              std::initializer_list<std::pair<std::string_view, std::string_view>> pairs) {
  for (const auto& [x, y] : pairs) {
    if ((a == x && b == y) || (a == y && b == x)) return true;
  }
  return false;
}

std::optional<std::string> morphology(const std::string& a, const std::string& b,
                                      const PosTagger& tagger) {
  const auto pa = tagger.tag(a);
  const auto pb = tagger.tag(b);
  if (in_pairs(a, b, {{"is", "are"}, {"was", "were"}, {"has", "have"}, {"does", "do"},
                      {"am", "is"}, {"am", "are"}})) {
    return "VERB:SVA";
  }
  if (in_pairs(a, b, {{"is", "was"}, {"are", "were"}, {"has", "had"}, {"have", "had"},
                      {"do", "did"}, {"does", "did"}, {"will", "would"}, {"can", "could"},
                      {"shall", "should"}, {"may", "might"}, {"am", "was"}})) {
    return "VERB:TENSE";
  }
  if (is_inflection_pair(a, b)) {
    const std::string& base = a.size() < b.size() ? a : b;
    const auto pbase = tagger.tag(base);
    if (pbase == Pos::VERB) return "VERB:SVA";
    if (pbase == Pos::NOUN) return "NOUN:NUM";
  }
  if (pa == Pos::ADJ && pb == Pos::ADJ) {
    auto compared = [](const std::string& base, const std::string& form) {
      return form == base + "er" || form == base + "est" || form == base + "r" ||
             form == base + "st";
    };
    if (compared(a, b) || compared(b, a)) return "ADJ:FORM";
  }
  if ((pa == Pos::VERB || pb == Pos::VERB) && is_verb_form_pair(a, b)) return "VERB:FORM";
  return std::nullopt;
}

std::string dominant_category(const Edit& e, const PosTagger& tagger) {
  std::optional<std::string_view> category;
  auto visit = [&](const Tokens& tokens) -> bool {
    for (const auto& t : tokens) {
      const auto pos = tagger.tag(t);
      if (!pos) return false;
      const auto c = pos_category(*pos);
      if (category && *category != c) return false;
      category = c;
    }
    return true;
  };
  if (!visit(e.src_tokens) || !visit(e.tgt_tokens) || !category) return "OTHER";
  return std::string(*category);
}

}  // namespace

std::string classify_edit(const Edit& e, const PosTagger& tagger) {
  const std::string prefix = std::string(1, operation_prefix(e.operation)) + ":";
  if (e.operation == Operation::substitute) {
    Tokens src_lower, tgt_lower;
    for (const auto& t : e.src_tokens) src_lower.push_back(to_lower_ascii(t));
    for (const auto& t : e.tgt_tokens) tgt_lower.push_back(to_lower_ascii(t));

    if (src_lower.size() >= 2 && src_lower.size() == tgt_lower.size() && src_lower != tgt_lower) {
      Tokens a = src_lower, b = tgt_lower;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a == b) return prefix + "WO";
    }
    if (join_tokens(src_lower, "") == join_tokens(tgt_lower, "")) return prefix + "ORTH";

    if (src_lower.size() == 1 && tgt_lower.size() == 1) {
      const std::string& s = src_lower[0];
      const std::string& t = tgt_lower[0];
      const auto ps = tagger.tag(s);
      const auto pt = tagger.tag(t);
      const bool alphabetic = std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '-' || c == '\'';
      });
      if (alphabetic && !tagger.in_lexicon(s) && ps && pt && *ps == *pt &&
          normalized_char_distance(s, t) <= 0.5) {
        return prefix + "SPELL";
      }
      if (auto morph = morphology(s, t, tagger)) return prefix + *morph;
    }
  }
  return prefix + dominant_category(e, tagger);
}

std::vector<Edit> extract_typed_edits(const Tokens& source, const Tokens& target,
                                      const PosTagger& tagger, const AlignCosts& costs) {
  auto edits = extract_edits(align_tokens(source, target, costs));
  for (auto& e : edits) e.etype = classify_edit(e, tagger);
  return edits;
}

}  // namespace gecqe
