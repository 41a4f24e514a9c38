#include "trates/text/readability.hpp"

#include <algorithm>
#include <cmath>

#include "words.hpp"

namespace trates::text {

TextStats compute_text_stats(const TokenizedEssay& essay, const Lexicons& lex) {
  TextStats s;
  for (const auto& sentence : detail::sentence_words(essay)) {
    s.sentences += 1;
    for (const auto& w : sentence) {
      s.words += 1;
      s.syllables += w.syllables;
      s.characters += w.chars;
      if (w.chars >= 7) s.long_words += 1;
      if (w.syllables >= 3) s.complex_words += 1;
      else s.easy_words += 1;
      if (!detail::is_familiar(w, lex)) s.difficult_words += 1;
      if (detail::is_misspelled(w, lex)) s.spelling_errors += 1;
    }
  }
  return s;
}

std::array<double, 11> ReadabilityScores::values() const {
  return {spelling_err, automated_readability, linsear_write, kincaid, coleman_liau,
          flesch_reading_ease, gunning_fog, lix, smog, rix, dale_chall};
}

ReadabilityScores readability_from_stats(const TextStats& s) {
  const double w = std::max(s.words, 1.0);
  const double n = std::max(s.sentences, 1.0);
  const double wps = w / n;
  ReadabilityScores r;
  r.spelling_err = s.spelling_errors;
  r.automated_readability = 4.71 * (s.characters / w) + 0.5 * wps - 21.43;
  {
    const double raw = (s.easy_words + 3.0 * s.complex_words) / n;
    r.linsear_write = raw > 20.0 ? raw / 2.0 : (raw - 2.0) / 2.0;
  }
  r.kincaid = 0.39 * wps + 11.8 * (s.syllables / w) - 15.59;
  {
    const double letters_per_100 = 100.0 * s.characters / w;
    const double sentences_per_100 = 100.0 * n / w;
    r.coleman_liau = 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8;
  }
  r.flesch_reading_ease = 206.835 - 1.015 * wps - 84.6 * (s.syllables / w);
  r.gunning_fog = 0.4 * (wps + 100.0 * s.complex_words / w);
  r.lix = wps + 100.0 * s.long_words / w;
  r.smog = 1.0430 * std::sqrt(s.complex_words * 30.0 / n) + 3.1291;
  r.rix = s.long_words / n;
  {
    const double pct_difficult = 100.0 * s.difficult_words / w;
    r.dale_chall = 0.1579 * pct_difficult + 0.0496 * wps + (pct_difficult > 5.0 ? 3.6365 : 0.0);
  }
  return r;
}

ReadabilityScores readability_scores(const TokenizedEssay& essay, const Lexicons& lex) {
  return readability_from_stats(compute_text_stats(essay, lex));
}

}  // namespace trates::text
