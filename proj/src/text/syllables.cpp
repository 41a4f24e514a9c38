#include "trates/text/syllables.hpp"

#include <cctype>
#include <string>

namespace trates::text {

namespace {

bool vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}
bool strict_vowel(char c) { return vowel(c) && c != 'y'; }

bool contains(const std::string& w, std::string_view p) { return w.find(p) != std::string::npos; }

}  // namespace

// Vowel-group count corrected by the usual sub/add suffix patterns
// (after Lingua::EN::Syllable), with a dropped triple-vowel rule.
int count_syllables(std::string_view raw) {
  std::string w;
  for (char c : raw)
    if (std::isalpha(static_cast<unsigned char>(c)))
      w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (w.size() <= 1) return 1;

  // Silent final e, but keep the vowel for "-le" after a consonant and for "-ee".
  if (w.back() == 'e' && w.size() > 2) {
    const char prev = w[w.size() - 2];
    const bool consonant_le = prev == 'l' && w.size() > 2 && !vowel(w[w.size() - 3]);
    if (!consonant_le && prev != 'e') w.pop_back();
  }

  int groups = 0;
  bool in_group = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    // Leading y is a consonant ("yes", "young").
    const bool v = vowel(w[i]) && !(w[i] == 'y' && i == 0);
    if (v && !in_group) ++groups;
    in_group = v;
  }

  int adj = 0;
  const std::size_t n = w.size();
  const bool cious = contains(w, "cious");
  for (std::string_view p : {"cial", "tia", "cius", "giu", "ion"})
    if (contains(w, p)) --adj;
  if (cious || contains(w, "iou")) --adj;
  if (w.ends_with("sia")) --adj;
  if (n > 3 && w.ends_with("ely")) --adj;
  // Silent -ed / -es after a consonant, except syllabic "-tled", "-bles", ...
  auto silent_suffix = [&](std::string_view suffix) {
    if (n <= suffix.size() + 1 || !w.ends_with(suffix)) return false;
    const char c = w[n - suffix.size() - 1];
    if (vowel(c)) return false;
    if (c == 'l' && n > suffix.size() + 2 && !vowel(w[n - suffix.size() - 2]) &&
        w[n - suffix.size() - 2] != 'l')
      return false;
    return true;
  };
  if (silent_suffix("ed") && w[n - 3] != 't' && w[n - 3] != 'd') --adj;
  if (silent_suffix("es") && !w.ends_with("ses") && !w.ends_with("xes") && !w.ends_with("zes") &&
      !w.ends_with("ches") && !w.ends_with("shes") && !w.ends_with("ges") && !w.ends_with("ces"))
    --adj;
  // Silent e before a consonant-initial suffix or compound part.
  for (std::string_view m : {"ment", "ful", "ness", "less", "fore", "thing", "time", "where"}) {
    const std::size_t pos = w.find(m);
    if (pos != std::string::npos && pos >= 3 && w[pos - 1] == 'e' && !vowel(w[pos - 2]) &&
        vowel(w[pos - 3]) && !(pos >= 4 && vowel(w[pos - 4]) && w[pos - 3] == w[pos - 4])) {
      --adj;
      break;
    }
  }
  if (w.starts_with("every")) --adj;

  for (std::string_view p : {"ia", "riet", "dien", "iu", "io", "ii"})
    if (contains(w, p)) ++adj;
  if (n > 3 && w.ends_with("ious") && !cious && w[n - 5] != 't' && w[n - 5] != 'x' &&
      w[n - 5] != 'g')
    ++adj;
  if (n >= 4 && w.ends_with("ing") && vowel(w[n - 4])) ++adj;
  if (n >= 4 && w.ends_with("ea")) ++adj;
  if (n >= 3 && w.ends_with("bl")) {
    const char c = w[n - 3];
    if (strict_vowel(c) || c == 'y' || c == 'm') ++adj;
  }
  if (w.starts_with("mc")) ++adj;
  if (w.ends_with("ism")) ++adj;
  if (n >= 3 && w.back() == 'l' && w[n - 2] == w[n - 3] && !vowel(w[n - 2])) ++adj;
  for (std::size_t pos = w.find("lien"); pos != std::string::npos; pos = w.find("lien", pos + 1))
    if (pos > 0 && w[pos - 1] != 'l') {
      ++adj;
      break;
    }
  if (n >= 5 && w.starts_with("coa") && (w[3] == 'd' || w[3] == 'g' || w[3] == 'l' || w[3] == 'x'))
    ++adj;
  for (std::size_t pos = w.find("ua"); pos != std::string::npos; pos = w.find("ua", pos + 1)) {
    if (pos > 0 && pos + 2 < n && w[pos - 1] != 'g' && w[pos - 1] != 'q') {
      const char c = w[pos + 2];
      if (!(c == 'a' || c == 'u' || c == 'i' || c == 'e' || c == 'o')) {
        ++adj;
        break;
      }
    }
  }
  if (w.ends_with("dnt")) ++adj;

  const int total = groups + adj;
  return total < 1 ? 1 : total;
}

}  // namespace trates::text
