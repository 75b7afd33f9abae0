#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace gecqe {

// Coarse part-of-speech classes. Category names follow the ERRANT
// inventory; NUM and SYM have no category of their own and map to OTHER.
enum class Pos { ADJ, ADV, CONJ, CONTR, DET, NOUN, NUM, PART, POSS, PREP, PRON, PUNCT, SYM, VERB };

std::string_view pos_category(Pos pos);

// Pluggable tagger contract. tag() returns nullopt when no tag is available,
// which makes the edit classifier fall back to OTHER.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::optional<Pos> tag(std::string_view token) const = 0;
  // Whether the token is a known word (used by the spelling rule).
  virtual bool in_lexicon(std::string_view token) const = 0;
};

// Default tagger: closed-class and common-word lexicon, then suffix rules,
// then NOUN. Immutable after construction.
class LexiconTagger final : public PosTagger {
 public:
  LexiconTagger();
  std::optional<Pos> tag(std::string_view token) const override;
  bool in_lexicon(std::string_view token) const override;

  static const LexiconTagger& instance();

 private:
  std::unordered_map<std::string, Pos> lexicon_;
};

std::string to_lower_ascii(std::string_view s);

}  // namespace gecqe
