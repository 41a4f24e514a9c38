#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace trates::text {

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the normalized essay
  std::size_t end = 0;
};

using Sentence = std::vector<Token>;

struct TokenizedEssay {
  std::vector<Sentence> sentences;

  std::size_t token_count() const;
};

/// Sentence segmentation on terminal punctuation (with abbreviation guards and
/// blank-line paragraph breaks) followed by PTB-style word tokenization:
/// punctuation and clitics (n't, 's, 're, ...) become separate tokens.
/// Token spans are byte offsets; the text between consecutive spans is
/// whitespace only.
TokenizedEssay tokenize(std::string_view text);

/// True for abbreviations whose trailing period belongs to the token.
bool is_abbreviation(std::string_view token_with_period);

/// True when the token has at least one letter or digit (i.e. counts as a word).
bool is_word_token(std::string_view token);

/// True when every character is punctuation.
bool is_punct_token(std::string_view token);

std::string to_lower_ascii(std::string_view s);

}  // namespace trates::text
