#include "gecqe/tagger.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <initializer_list>
#include <utility>

namespace gecqe {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view pos_category(Pos pos) {
  switch (pos) {
    case Pos::ADJ: return "ADJ";
    case Pos::ADV: return "ADV";
    case Pos::CONJ: return "CONJ";
    case Pos::CONTR: return "CONTR";
    case Pos::DET: return "DET";
    case Pos::NOUN: return "NOUN";
    case Pos::PART: return "PART";
    case Pos::POSS: return "NOUN:POSS";
    case Pos::PREP: return "PREP";
    case Pos::PRON: return "PRON";
    case Pos::PUNCT: return "PUNCT";
    case Pos::VERB: return "VERB";
    case Pos::NUM:
    case Pos::SYM: return "OTHER";
  }
  return "OTHER";
}

namespace {

void add(std::unordered_map<std::string, Pos>& lex, Pos pos,
         std::initializer_list<const char*> words) {
  for (const char* w : words) lex.emplace(w, pos);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 && s.ends_with(suffix);
}

}  // namespace

LexiconTagger::LexiconTagger() {
  auto& lex = lexicon_;
  add(lex, Pos::DET, {"a", "an", "the", "this", "that", "these", "those", "some", "any", "each",
                      "every", "no", "another", "either", "neither", "all", "both", "my", "your",
                      "his", "her", "its", "our", "their", "much", "many", "few", "several",
                      "such", "what", "whatever"});
  add(lex, Pos::PRON, {"i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them",
                       "myself", "yourself", "himself", "herself", "itself", "ourselves",
                       "themselves", "who", "whom", "whose", "which", "mine", "yours", "hers",
                       "ours", "theirs", "someone", "something", "anyone", "anything",
                       "everyone", "everything", "nobody", "nothing", "somebody", "everybody",
                       "one", "none"});
  add(lex, Pos::PREP, {"in", "on", "at", "by", "for", "with", "about", "against", "between",
                       "into", "through", "during", "before", "after", "above", "below", "to",
                       "from", "up", "down", "of", "off", "over", "under", "around", "among",
                       "across", "along", "behind", "beyond", "near", "since", "until", "upon",
                       "within", "without", "toward", "towards", "despite", "except", "like",
                       "via", "onto", "inside", "outside", "per", "than"});
  add(lex, Pos::CONJ, {"and", "or", "but", "nor", "so", "yet", "because", "although", "though",
                       "while", "whereas", "if", "unless", "whether", "as", "once"});
  add(lex, Pos::PART, {"not", "'"});
  add(lex, Pos::POSS, {"'s"});
  add(lex, Pos::CONTR, {"n't", "'ll", "'d", "'re", "'ve", "'m"});
  add(lex, Pos::VERB, {"be", "am", "is", "are", "was", "were", "been", "being", "have", "has",
                       "had", "having", "do", "does", "did", "done", "will", "would", "shall",
                       "should", "can", "could", "may", "might", "must", "think", "stay", "go",
                       "goes", "went", "gone", "get", "got", "make", "made", "know", "knew",
                       "take", "took", "taken", "see", "saw", "seen", "come", "came", "want",
                       "look", "use", "find", "found", "give", "gave", "given", "tell", "told",
                       "work", "call", "try", "ask", "need", "feel", "felt", "become", "became",
                       "leave", "left", "put", "mean", "meant", "keep", "kept", "let", "begin",
                       "began", "seem", "help", "talk", "turn", "start", "show", "hear",
                       "heard", "play", "run", "ran", "move", "live", "believe", "bring",
                       "brought", "happen", "write", "wrote", "written", "provide", "sit", "sat",
                       "stand", "stood", "lose", "lost", "pay", "paid", "meet", "met",
                       "include", "continue", "set", "learn", "change", "lead", "led",
                       "understand", "understood", "watch", "follow", "stop", "create",
                       "speak", "spoke", "read", "spend", "spent", "grow", "grew", "open",
                       "walk", "win", "won", "offer", "remember", "love", "consider", "appear",
                       "buy", "bought", "wait", "serve", "die", "send", "sent", "expect",
                       "build", "built", "fall", "fell", "cut", "reach", "kill", "remain",
                       "suggest", "raise", "pass", "sell", "sold", "require", "report",
                       "decide", "pull", "agree", "enjoy", "study", "travel", "eat", "ate",
                       "drink", "sleep", "say", "said", "hope", "improve", "affect", "solve",
                       "reduce", "increase", "discuss", "explain", "allow", "prefer"});
  add(lex, Pos::ADV, {"very", "really", "also", "just", "too", "quite", "rather", "often",
                      "always", "never", "sometimes", "usually", "already", "still", "even",
                      "only", "here", "there", "now", "then", "however", "therefore",
                      "moreover", "soon", "again", "almost", "perhaps", "maybe", "well", "not",
                      "yesterday", "today", "tomorrow", "together", "away", "back", "ever",
                      "instead", "furthermore", "nowadays", "especially", "mentally", "more",
                      "most", "less", "least", "how", "when", "where", "why"});
  add(lex, Pos::ADJ, {"good", "bad", "big", "small", "new", "old", "happy", "sad", "important",
                      "different", "large", "long", "little", "great", "high", "low", "young",
                      "easy", "hard", "early", "late", "same", "own", "other", "able", "free",
                      "sure", "real", "whole", "best", "better", "worse", "worst", "healthy",
                      "emotional", "difficult", "possible", "necessary", "beautiful",
                      "interesting", "popular", "modern", "public", "social", "serious",
                      "simple", "strong", "nice", "clear", "full", "main", "last", "first",
                      "next", "few"});
  add(lex, Pos::NOUN, {"family", "people", "time", "year", "years", "way", "day", "days",
                       "man", "men", "woman", "women", "child", "children", "world", "life",
                       "school", "student", "students", "teacher", "country", "city", "home",
                       "house", "money", "job", "work", "problem", "problems", "stress",
                       "health", "friend", "friends", "cats", "cat", "dog", "dogs", "car",
                       "cars", "book", "books", "thing", "things", "number", "part", "place",
                       "case", "week", "company", "system", "program", "question", "government",
                       "water", "room", "mother", "father", "area", "story", "fact", "month",
                       "lot", "study", "night", "point", "business", "information", "society",
                       "technology", "internet", "phone", "environment", "education",
                       "opinion", "reason", "example", "idea", "food", "town", "parents"});
  add(lex, Pos::PUNCT, {".", ",", "!", "?", ";", ":", "\"", "(", ")", "-", "--", "...", "``",
                        "''", "[", "]"});
}

const LexiconTagger& LexiconTagger::instance() {
  static const LexiconTagger tagger;
  return tagger;
}

bool LexiconTagger::in_lexicon(std::string_view token) const {
  return lexicon_.count(to_lower_ascii(token)) > 0;
}

std::optional<Pos> LexiconTagger::tag(std::string_view token) const {
  if (token.empty()) return std::nullopt;
  const std::string lower = to_lower_ascii(token);
  if (auto it = lexicon_.find(lower); it != lexicon_.end()) return it->second;

  const bool all_punct = std::all_of(lower.begin(), lower.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c));
  });
  if (all_punct) return Pos::PUNCT;
  const bool numeric = std::all_of(lower.begin(), lower.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == ',';
  });
  if (numeric) return Pos::NUM;
  if (!std::isalpha(static_cast<unsigned char>(lower[0]))) return Pos::SYM;

  // Longest suffixes first within each class.
  static const std::array<std::pair<std::string_view, Pos>, 27> suffixes{{
      {"ly", Pos::ADV},     {"tion", Pos::NOUN}, {"sion", Pos::NOUN}, {"ment", Pos::NOUN},
      {"ness", Pos::NOUN},  {"ity", Pos::NOUN},  {"ance", Pos::NOUN}, {"ence", Pos::NOUN},
      {"ship", Pos::NOUN},  {"ism", Pos::NOUN},  {"ist", Pos::NOUN},  {"ing", Pos::VERB},
      {"ed", Pos::VERB},    {"ize", Pos::VERB},  {"ise", Pos::VERB},  {"ate", Pos::VERB},
      {"ify", Pos::VERB},   {"ous", Pos::ADJ},   {"ful", Pos::ADJ},   {"ive", Pos::ADJ},
      {"able", Pos::ADJ},   {"ible", Pos::ADJ},  {"al", Pos::ADJ},    {"ic", Pos::ADJ},
      {"less", Pos::ADJ},   {"y", Pos::ADJ},     {"er", Pos::NOUN},
  }};
  for (const auto& [suffix, pos] : suffixes) {
    if (ends_with(lower, suffix)) return pos;
  }
  return Pos::NOUN;
}

}  // namespace gecqe
