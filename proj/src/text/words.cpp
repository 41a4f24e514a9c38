#include "words.hpp"

#include <cctype>

#include "trates/text/syllables.hpp"

namespace trates::text::detail {

namespace {

std::string fold(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size(); ++i) {
    // U+2019 RIGHT SINGLE QUOTATION MARK
    if (token.compare(i, 3, "\xE2\x80\x99") == 0) {
      out.push_back('\'');
      i += 2;
      continue;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(token[i]))));
  }
  return out;
}

bool known_with_inflection(const std::string& w, const std::unordered_set<std::string>& list) {
  if (list.count(w)) return true;
  for (std::string_view suf : {"s", "es", "ed", "d", "ing"}) {
    if (w.size() > suf.size() + 2 && w.compare(w.size() - suf.size(), suf.size(), suf) == 0 &&
        list.count(w.substr(0, w.size() - suf.size())))
      return true;
  }
  return false;
}

}  // namespace

bool is_clitic(std::string_view token) {
  const std::string f = fold(token);
  return f == "n't" || (f.size() >= 2 && f[0] == '\'' && std::isalpha(static_cast<unsigned char>(f[1])));
}

std::vector<std::vector<Word>> sentence_words(const TokenizedEssay& essay) {
  std::vector<std::vector<Word>> out;
  out.reserve(essay.sentences.size());
  for (const auto& sentence : essay.sentences) {
    std::vector<Word> words;
    for (const auto& tok : sentence) {
      if (!is_word_token(tok.text)) continue;
      std::string f = fold(tok.text);
      int chars = 0;
      bool digit = false;
      for (unsigned char c : f) {
        if (std::isalnum(c) || (c >= 0x80 && (c & 0xC0) != 0x80)) ++chars;
        digit = digit || std::isdigit(c);
      }
      if (is_clitic(tok.text) && !words.empty()) {
        Word& w = words.back();
        w.lower += f;
        w.chars += chars;
        continue;
      }
      Word w;
      w.lower = f;
      w.parts.push_back(f);
      w.chars = chars;
      w.has_digit = digit;
      words.push_back(std::move(w));
    }
    for (auto& w : words) w.syllables = count_syllables(w.parts.front());
    out.push_back(std::move(words));
  }
  return out;
}

bool is_familiar(const Word& w, const Lexicons& lex) {
  if (w.has_digit) return true;
  if (lex.dale_chall_easy.count(w.lower)) return true;
  return known_with_inflection(w.parts.front(), lex.dale_chall_easy);
}

bool is_misspelled(const Word& w, const Lexicons& lex) {
  if (w.has_digit) return false;
  // Hyphenated and slashed compounds are checked piece by piece.
  const std::string& base = w.parts.front();
  std::size_t start = 0;
  while (start <= base.size()) {
    std::size_t end = base.find_first_of("-/", start);
    if (end == std::string::npos) end = base.size();
    const std::string piece = base.substr(start, end - start);
    bool alpha = false;
    for (unsigned char c : piece) alpha = alpha || std::isalpha(c);
    if (alpha && !lex.dictionary.count(piece) && !known_with_inflection(piece, lex.dictionary))
      return true;
    start = end + 1;
  }
  return false;
}

}  // namespace trates::text::detail
