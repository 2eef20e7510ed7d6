#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qdlm {

using Token = std::string;
using TokenList = std::vector<std::string>;

// Raw-text marker for a silent user turn; lowercases to the word "silence".
inline constexpr std::string_view kSilenceMarker = "<SILENCE>";

// Lowercasing whitespace/punctuation tokenizer. Word characters are
// [a-z0-9_'], so contractions ("you're") and snake_case identifiers
// ("resto_bombay_1", "api_call") survive as single tokens.
TokenList tokenize(std::string_view text);

std::string join_tokens(const TokenList& tokens);

// tokenize + join: canonical lowercase form used for utterance comparison.
std::string normalize(std::string_view text);

}  // namespace qdlm
