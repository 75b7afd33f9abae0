#include "gecqe/types.hpp"

namespace gecqe {

namespace {
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
}  // namespace

Tokens split_tokens(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string join_tokens(const Tokens& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

char operation_prefix(Operation op) {
  switch (op) {
    case Operation::insert: return 'M';
    case Operation::remove: return 'U';
    case Operation::substitute: return 'R';
  }
  return 'R';
}

std::string_view operation_name(Operation op) {
  switch (op) {
    case Operation::insert: return "insert";
    case Operation::remove: return "delete";
    case Operation::substitute: return "substitute";
  }
  return "substitute";
}

Operation operation_for(const Span& src, const Tokens& tgt_tokens) {
  if (src.empty()) return Operation::insert;
  if (tgt_tokens.empty()) return Operation::remove;
  return Operation::substitute;
}

}  // namespace gecqe
