#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "trates/text/lexicons.hpp"
#include "trates/text/tokenizer.hpp"

namespace trates::text {

/// Surface counts every readability formula is computed from.
struct TextStats {
  double words = 0;
  double sentences = 0;
  double syllables = 0;
  double characters = 0;      // letters and digits inside word tokens
  double long_words = 0;      // >= 7 characters
  double complex_words = 0;   // >= 3 syllables (also the SMOG polysyllable count)
  double difficult_words = 0; // not on the Dale-Chall familiar list
  double spelling_errors = 0;
  double easy_words = 0;      // <= 2 syllables, for Linsear Write
};

TextStats compute_text_stats(const TokenizedEssay& essay, const Lexicons& lex);

inline constexpr std::array<std::string_view, 11> kReadabilityNames = {
    "spelling_err", "automated_readability", "linsear_write", "kincaid",
    "coleman_liau", "flesch_reading_ease",   "gunning_fog",   "lix",
    "smog",         "rix",                   "dale_chall"};

struct ReadabilityScores {
  double spelling_err = 0;
  double automated_readability = 0;
  double linsear_write = 0;
  double kincaid = 0;
  double coleman_liau = 0;
  double flesch_reading_ease = 0;
  double gunning_fog = 0;
  double lix = 0;
  double smog = 0;
  double rix = 0;
  double dale_chall = 0;

  std::array<double, 11> values() const;
};

/// Published formulas; constants are listed in docs/readability.md.
/// Word and sentence counts below 1 are floored to 1.
ReadabilityScores readability_from_stats(const TextStats& s);

ReadabilityScores readability_scores(const TokenizedEssay& essay, const Lexicons& lex);

}  // namespace trates::text
