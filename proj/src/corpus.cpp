#include "gecqe/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gecqe/align.hpp"
#include "gecqe/errors.hpp"
#include "gecqe/random.hpp"

namespace gecqe {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_on(std::string_view text, std::string_view delim) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(delim, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + delim.size();
  }
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

long parse_int(std::string_view s, std::size_t line_no, const char* what) {
  long value = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(s) + "'", line_no);
  }
  return value;
}

struct PendingEdit {
  Edit edit;
  std::size_t line = 0;
};

// Sorts one annotator's edits, fills target spans, and rebuilds the correction.
std::vector<Edit> finalize_edits(std::vector<PendingEdit> pending, std::size_t source_len,
                                 const Tokens& source, Tokens& correction) {
  std::stable_sort(pending.begin(), pending.end(), [](const PendingEdit& x, const PendingEdit& y) {
    if (x.edit.src_span.begin != y.edit.src_span.begin)
      return x.edit.src_span.begin < y.edit.src_span.begin;
    return x.edit.src_span.end < y.edit.src_span.end;
  });
  std::vector<Edit> edits;
  edits.reserve(pending.size());
  long delta = 0;
  for (auto& p : pending) {
    Edit& e = p.edit;
    if (e.src_span.end > source_len) {
      throw StructuralError("line " + std::to_string(p.line) + ": edit span " +
                            std::to_string(e.src_span.begin) + "-" +
                            std::to_string(e.src_span.end) + " exceeds source length " +
                            std::to_string(source_len));
    }
    const long begin = static_cast<long>(e.src_span.begin) + delta;
    e.tgt_span = Span{static_cast<std::size_t>(begin), static_cast<std::size_t>(begin) + e.tgt_tokens.size()};
    delta += static_cast<long>(e.tgt_tokens.size()) - static_cast<long>(e.src_span.size());
    edits.push_back(std::move(e));
  }
  try {
    check_non_overlapping(edits);
  } catch (const StructuralError& err) {
    throw StructuralError("edits of block ending at line " +
                          std::to_string(pending.empty() ? 0 : pending.back().line) + ": " +
                          err.what());
  }
  correction = apply_edits(source, edits);
  return edits;
}

}  // namespace

std::vector<ParallelPair> parse_m2(std::string_view text) {
  std::vector<ParallelPair> pairs;
  const auto lines = split_lines(text);

  bool in_block = false;
  Tokens source;
  std::map<long, std::vector<PendingEdit>> by_annotator;

  auto flush = [&]() {
    if (!in_block) return;
    ParallelPair pair;
    pair.source = Sentence{std::to_string(pairs.size()), source};
    const long n_annotators = by_annotator.empty() ? 1 : by_annotator.rbegin()->first + 1;
    std::vector<std::vector<Edit>> all_edits;
    for (long a = 0; a < n_annotators; ++a) {
      Tokens correction;
      auto it = by_annotator.find(a);
      std::vector<PendingEdit> pending = it == by_annotator.end() ? std::vector<PendingEdit>{}
                                                                  : std::move(it->second);
      all_edits.push_back(finalize_edits(std::move(pending), source.size(), source, correction));
      pair.corrections.push_back(Sentence{pair.source.id, std::move(correction)});
    }
    pair.annotator_edits = std::move(all_edits);
    pairs.push_back(std::move(pair));
    in_block = false;
    by_annotator.clear();
    source.clear();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (is_blank(line)) {
      flush();
      continue;
    }
    if (line == "S" || line.starts_with("S ")) {
      if (in_block) throw ParseError("S line inside a block (missing blank line?)", line_no);
      in_block = true;
      source = split_tokens(line.substr(1));
      continue;
    }
    if (line.starts_with("A ")) {
      if (!in_block) throw ParseError("A line outside a block", line_no);
      const auto fields = split_on(line.substr(2), "|||");
      if (fields.size() < 6) {
        throw ParseError("A line needs 6 '|||'-separated fields, got " +
                             std::to_string(fields.size()),
                         line_no);
      }
      const Tokens span_fields = split_tokens(fields[0]);
      if (span_fields.size() != 2) throw ParseError("A line span must be '<start> <end>'", line_no);
      const long start = parse_int(span_fields[0], line_no, "edit start");
      const long end = parse_int(span_fields[1], line_no, "edit end");
      const Tokens annotator_field = split_tokens(fields[5]);
      if (annotator_field.size() != 1) throw ParseError("missing annotator id", line_no);
      const long annotator = parse_int(annotator_field[0], line_no, "annotator id");
      if (annotator < 0) throw ParseError("negative annotator id", line_no);
      auto& bucket = by_annotator[annotator];
      if (start == -1 && end == -1) continue;  // noop: annotator made no edits
      if (start < 0 || end < start) {
        throw StructuralError("line " + std::to_string(line_no) + ": invalid edit span " +
                              std::to_string(start) + "-" + std::to_string(end));
      }
      Tokens replacement = split_tokens(fields[2]);
      if (replacement.size() == 1 && replacement[0] == "-NONE-") replacement.clear();
      if (start == end && replacement.empty()) continue;  // zero-length, no effect
      if (static_cast<std::size_t>(end) > source.size()) {
        throw StructuralError("line " + std::to_string(line_no) + ": edit span " +
                              std::to_string(start) + "-" + std::to_string(end) +
                              " exceeds source length " + std::to_string(source.size()));
      }
      Edit e;
      e.src_span = Span{static_cast<std::size_t>(start), static_cast<std::size_t>(end)};
      e.src_tokens.assign(source.begin() + start, source.begin() + end);
      e.tgt_tokens = std::move(replacement);
      e.operation = operation_for(e.src_span, e.tgt_tokens);
      e.etype = std::string(fields[1]);
      bucket.push_back(PendingEdit{std::move(e), line_no});
      continue;
    }
    throw ParseError("unrecognized M2 line (expected 'S ...', 'A ...' or blank)", line_no);
  }
  flush();
  return pairs;
}

std::string serialize_m2(const std::vector<ParallelPair>& pairs) {
  std::ostringstream out;
  for (const auto& pair : pairs) {
    out << "S";
    if (!pair.source.tokens.empty()) out << ' ' << join_tokens(pair.source.tokens);
    out << '\n';
    if (pair.annotator_edits) {
      const auto& all = *pair.annotator_edits;
      for (std::size_t a = 0; a < all.size(); ++a) {
        if (all[a].empty() && all.size() > 1) {
          out << "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" << a << '\n';
        }
        for (const auto& e : all[a]) {
          out << "A " << e.src_span.begin << ' ' << e.src_span.end << "|||"
              << (e.etype.empty() ? "UNK" : e.etype) << "|||" << join_tokens(e.tgt_tokens)
              << "|||REQUIRED|||-NONE-|||" << a << '\n';
        }
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<ParallelPair> parse_parallel_tsv(std::string_view text) {
  std::vector<ParallelPair> pairs;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_on(lines[i], "\t");
    if (fields.size() < 2) {
      throw ParseError("expected source<TAB>correction, found " + std::to_string(fields.size()) +
                           " field",
                       i + 1);
    }
    ParallelPair pair;
    pair.source = Sentence{std::to_string(pairs.size()), split_tokens(fields[0])};
    for (std::size_t f = 1; f < fields.size(); ++f) {
      pair.corrections.push_back(Sentence{pair.source.id, split_tokens(fields[f])});
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<ParallelPair> load_parallel(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    if (path.extension() == ".m2") return parse_m2(text);
    return parse_parallel_tsv(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  } catch (const StructuralError& e) {
    throw StructuralError(path.string() + ": " + e.what());
  }
}

DatasetSplit split_dataset(const std::vector<ParallelPair>& pairs, const SplitSpec& spec) {
  if (pairs.empty()) throw Error("split_dataset: empty input");
  double sum = 0.0;
  for (double r : spec.ratios) {
    if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  const bool all_positive = std::all_of(spec.ratios.begin(), spec.ratios.end(),
                                        [](double r) { return r > 0.0; });
  if (all_positive && pairs.size() < 3) {
    throw Error("split_dataset: need at least 3 pairs for three non-empty partitions");
  }

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(order);

  const double n = static_cast<double>(pairs.size());
  const auto n_dev = static_cast<std::size_t>(std::floor(n * spec.ratios[1] + 1e-9));
  const auto n_devtest = static_cast<std::size_t>(std::floor(n * spec.ratios[2] + 1e-9));
  const std::size_t n_train = pairs.size() - n_dev - n_devtest;

  DatasetSplit split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& p = pairs[order[i]];
    if (i < n_train) split.train.push_back(p);
    else if (i < n_train + n_dev) split.dev.push_back(p);
    else split.devtest.push_back(p);
  }
  return split;
}

const Sentence* JudgmentSet::find_source(std::string_view id) const {
  for (const auto& s : sources) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const Sentence* JudgmentSet::find_hypothesis(const std::string& source,
                                             const std::string& system) const {
  auto it = hypotheses.find({source, system});
  return it == hypotheses.end() ? nullptr : &it->second;
}

bool JudgmentSet::has_system(std::string_view name) const {
  return std::find(systems.begin(), systems.end(), name) != systems.end();
}

namespace {

Tokens token_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of tokens");
  Tokens out;
  for (const auto& t : j) {
    if (!t.is_string()) throw SchemaError(where + ": tokens must be strings");
    out.push_back(t.get<std::string>());
  }
  return out;
}

}  // namespace

JudgmentSet parse_judgments(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw SchemaError("judgments: top level must be an object");
  for (const char* key : {"sources", "systems", "hypotheses", "human_pairwise"}) {
    if (!doc.contains(key)) throw SchemaError(std::string("judgments: missing key '") + key + "'");
  }

  JudgmentSet set;
  std::set<std::string> source_ids;
  const auto& sources = doc["sources"];
  if (!sources.is_array()) throw SchemaError("judgments: 'sources' must be an array");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    const std::string where = "sources[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("id") || !s["id"].is_string() || !s.contains("tokens")) {
      throw SchemaError(where + ": needs string 'id' and 'tokens'");
    }
    Sentence sentence{s["id"].get<std::string>(), token_array(s["tokens"], where)};
    if (!source_ids.insert(sentence.id).second) {
      throw SchemaError(where + ": duplicate source id '" + sentence.id + "'");
    }
    set.sources.push_back(std::move(sentence));
  }

  const auto& systems = doc["systems"];
  if (!systems.is_array()) throw SchemaError("judgments: 'systems' must be an array");
  std::set<std::string> system_names;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    if (!systems[i].is_string()) {
      throw SchemaError("systems[" + std::to_string(i) + "]: must be a string");
    }
    std::string name = systems[i].get<std::string>();
    if (!system_names.insert(name).second) {
      throw SchemaError("systems[" + std::to_string(i) + "]: duplicate system '" + name + "'");
    }
    set.systems.push_back(std::move(name));
  }

  const auto& hyps = doc["hypotheses"];
  if (!hyps.is_object()) throw SchemaError("judgments: 'hypotheses' must be an object");
  for (const auto& [source_id, per_system] : hyps.items()) {
    if (!source_ids.count(source_id)) {
      throw SchemaError("hypotheses['" + source_id + "']: unknown source");
    }
    if (!per_system.is_object()) {
      throw SchemaError("hypotheses['" + source_id + "']: must map systems to tokens");
    }
    for (const auto& [system, tokens] : per_system.items()) {
      const std::string where = "hypotheses['" + source_id + "']['" + system + "']";
      if (!system_names.count(system)) throw SchemaError(where + ": unknown system");
      set.hypotheses[{source_id, system}] = Sentence{source_id, token_array(tokens, where)};
    }
  }

  const auto& pw = doc["human_pairwise"];
  if (!pw.is_array()) throw SchemaError("judgments: 'human_pairwise' must be an array");
  for (std::size_t i = 0; i < pw.size(); ++i) {
    const auto& r = pw[i];
    const std::string where = "human_pairwise[" + std::to_string(i) + "]";
    for (const char* key : {"source", "a", "b", "verdict"}) {
      if (!r.is_object() || !r.contains(key) || !r[key].is_string()) {
        throw SchemaError(where + ": needs string field '" + key + "'");
      }
    }
    PairwiseJudgment j;
    j.source = r["source"].get<std::string>();
    j.a = r["a"].get<std::string>();
    j.b = r["b"].get<std::string>();
    const std::string verdict = r["verdict"].get<std::string>();
    if (!source_ids.count(j.source)) {
      throw SchemaError(where + ": unknown source '" + j.source + "'");
    }
    for (const auto* name : {&j.a, &j.b}) {
      if (!system_names.count(*name)) throw SchemaError(where + ": unknown system '" + *name + "'");
    }
    if (j.a == j.b) throw SchemaError(where + ": system compared with itself ('" + j.a + "')");
    if (verdict == "a") j.verdict = Verdict::a_better;
    else if (verdict == "b") j.verdict = Verdict::b_better;
    else if (verdict == "tie") j.verdict = Verdict::tie;
    else throw SchemaError(where + ": verdict must be 'a', 'b' or 'tie'");
    set.human_pairwise.push_back(std::move(j));
  }
  return set;
}

JudgmentSet load_judgments(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_judgments(text);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::string serialize_judgments(const JudgmentSet& set) {
  json doc;
  doc["sources"] = json::array();
  for (const auto& s : set.sources) doc["sources"].push_back({{"id", s.id}, {"tokens", s.tokens}});
  doc["systems"] = set.systems;
  doc["hypotheses"] = json::object();
  for (const auto& [key, sentence] : set.hypotheses) {
    doc["hypotheses"][key.first][key.second] = sentence.tokens;
  }
  doc["human_pairwise"] = json::array();
  for (const auto& j : set.human_pairwise) {
    const char* v = j.verdict == Verdict::a_better ? "a" : j.verdict == Verdict::b_better ? "b" : "tie";
    doc["human_pairwise"].push_back({{"source", j.source}, {"a", j.a}, {"b", j.b}, {"verdict", v}});
  }
  return doc.dump(1) + "\n";
}

}  // namespace gecqe
