#pragma once
// Internal: surface words shared by the readability and generic feature code.

#include <string>
#include <string_view>
#include <vector>

#include "trates/text/lexicons.hpp"
#include "trates/text/tokenizer.hpp"

namespace trates::text::detail {

/// A written word. Clitic tokens (n't, 's, ...) are folded into the word
/// they were split from, so "don't" counts once.
struct Word {
  std::string lower;             // lowercase, curly apostrophes folded to '
  std::vector<std::string> parts;  // lowercase non-clitic tokens, for lookups
  int chars = 0;                 // letters and digits
  int syllables = 1;
  bool has_digit = false;
};

bool is_clitic(std::string_view token);

/// Words of each sentence, in order. Sentences without words give empty lists.
std::vector<std::vector<Word>> sentence_words(const TokenizedEssay& essay);

bool is_familiar(const Word& w, const Lexicons& lex);
bool is_misspelled(const Word& w, const Lexicons& lex);

}  // namespace trates::text::detail
