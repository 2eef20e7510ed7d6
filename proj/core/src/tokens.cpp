#include "qdlm/tokens.hpp"

#include <cctype>

namespace qdlm {

TokenList tokenize(std::string_view text) {
  TokenList out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (unsigned char c : text) {
    char lc = static_cast<char>(std::tolower(c));
    if (std::isalnum(static_cast<unsigned char>(lc)) || lc == '_' || lc == '\'') {
      cur.push_back(lc);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string join_tokens(const TokenList& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string normalize(std::string_view text) { return join_tokens(tokenize(text)); }

}  // namespace qdlm
