#pragma once

// Independent reference implementations and hand-checked fixtures. Nothing
// here calls into the library code it is used to check.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trates::testing {

/// Kappa from pairwise sums over samples, without building histograms:
/// observed = sum_n w(p_n, g_n), expected = (1/N) sum_n sum_m w(p_n, g_m).
inline double qwk_bruteforce(const std::vector<double>& pred, const std::vector<double>& gold,
                             double lo, double step, int k) {
  const auto idx = [&](double v) { return static_cast<double>(std::llround((v - lo) / step)); };
  const double norm = static_cast<double>(k - 1) * static_cast<double>(k - 1);
  const auto w = [&](double i, double j) { return (i - j) * (i - j) / norm; };
  const double n = static_cast<double>(pred.size());
  double observed = 0.0, expected = 0.0;
  for (std::size_t a = 0; a < pred.size(); ++a) {
    observed += w(idx(pred[a]), idx(gold[a]));
    for (std::size_t b = 0; b < gold.size(); ++b) expected += w(idx(pred[a]), idx(gold[b]));
  }
  expected /= n;
  if (expected == 0.0) return observed == 0.0 ? 1.0 : -1.0;
  return 1.0 - observed / expected;
}

/// Surface counts of a fixture, counted by hand.
struct HandStats {
  const char* text;
  double words, sentences, syllables, characters, long_words, complex_words, difficult_words,
      easy_words, spelling_errors;
};

// Syllables follow dictionary hyphenation; "difficult" means absent from the
// Dale-Chall familiar list (after stripping -s/-ed/-ing).
inline const std::vector<HandStats>& readability_fixtures() {
  static const std::vector<HandStats> f = {
      // the cat sat on the mat: 6 one-syllable words, 3+3+3+2+3+3 letters
      {"The cat sat on the mat.", 6, 1, 6, 17, 0, 0, 0, 6, 0},
      // read-ing books is fun / my sis-ter likes read-ing each night
      {"Reading books is fun. My sister likes reading each night.", 10, 2, 13, 46, 2, 0, 0, 10, 0},
      // un-be-liev-a-ble(5) op-por-tu-ni-ties(5) ap-peared(2) im-me-di-ate-ly(5)
      // no-bod-y(3) un-der-stood(3) the(1) con-se-quen-ces(4)
      {"Unbelievable opportunities appeared immediately. Nobody understood the consequences.",
       8, 2, 28, 75, 6, 6, 5, 2, 0},
      // clitics stay attached to their word: don't, It's, can't
      {"I don't know. It's late and we can't wait!", 9, 2, 9, 29, 0, 0, 0, 9, 0},
      // gar-den be-hind yel-low, every other word one syllable
      {"Where is the dog? The dog is in the garden behind the yellow house.", 14, 2, 17, 52, 0, 0,
       0, 14, 0},
  };
  return f;
}

/// Published formulas evaluated directly from hand counts.
struct HandReadability {
  double ari, linsear, kincaid, coleman_liau, flesch, fog, lix, smog, rix, dale_chall;
};

inline HandReadability hand_readability(const HandStats& s) {
  const double w = s.words, n = s.sentences;
  HandReadability r{};
  r.ari = 4.71 * s.characters / w + 0.5 * w / n - 21.43;
  const double lw = (s.easy_words * 1.0 + s.complex_words * 3.0) / n;
  r.linsear = lw > 20 ? lw / 2 : (lw - 2) / 2;
  r.kincaid = 0.39 * (w / n) + 11.8 * (s.syllables / w) - 15.59;
  r.coleman_liau = 0.0588 * (s.characters / w * 100) - 0.296 * (n / w * 100) - 15.8;
  r.flesch = 206.835 - 1.015 * (w / n) - 84.6 * (s.syllables / w);
  r.fog = 0.4 * ((w / n) + 100 * (s.complex_words / w));
  r.lix = w / n + s.long_words * 100 / w;
  r.smog = 1.043 * std::sqrt(s.complex_words * (30 / n)) + 3.1291;
  r.rix = s.long_words / n;
  const double pdw = s.difficult_words / w * 100;
  r.dale_chall = 0.1579 * pdw + 0.0496 * (w / n) + (pdw > 5 ? 3.6365 : 0);
  return r;
}

struct RatingCase {
  const char* text;
  std::optional<int> expected;  // 3/2/1, or nullopt for a parse error
};

inline const std::vector<RatingCase>& rating_fixtures() {
  static const std::vector<RatingCase> f = {
      {"High", 3},
      {"HIGH", 3},
      {"medium quality overall", 2},
      {"Low", 1},
      {"low.", 1},
      {"Answer (High, Medium, or Low): low.", 1},
      {"Answer: High", 3},
      {"**Medium**", 2},
      {"The answer is: Medium.", 2},
      {"high\n\nExplanation: a few passages show low effort.", 3},
      {"  \tLOW  ", 1},
      {"Rating - Medium (the essay is mostly clear)", 2},
      {"(High, Medium, or Low) High", 3},
      {"I would say high, although parts are medium.", 3},
      {"high-quality work", 3},
      {"Low, low, low.", 1},
      {"The essay's organization is HIGH.", 3},
      {"lower than expected: Medium", 2},
      {"Highly organized; overall rating: medium", 2},
      {"Medium\nHigh", 2},
      // adversarial
      {"highly lowbrow", std::nullopt},
      {"It depends.", std::nullopt},
      {"", std::nullopt},
      {"High/Low", std::nullopt},
      {"medium or high", std::nullopt},
      {"mediums", std::nullopt},
      {"Answer (High, Medium, or Low):", std::nullopt},
      {"high_level", std::nullopt},
      {"3", std::nullopt},
  };
  return f;
}

/// "1- Question 1?" ... "n- Question n?" with the given separator.
inline std::string numbered_list(int n, const std::string& sep = "- ",
                                 const std::string& preamble = "") {
  std::string out = preamble;
  for (int i = 1; i <= n; ++i)
    out += std::to_string(i) + sep + "How would you rate aspect " + std::to_string(i) + "?\n";
  return out;
}

}  // namespace trates::testing
