#include "trates/text/lexicons.hpp"

#include <cstdlib>
#include <fstream>

#include "trates/common/error.hpp"

#ifndef TRATES_DEFAULT_ASSET_DIR
#define TRATES_DEFAULT_ASSET_DIR "assets"
#endif

namespace trates::text {

namespace {

std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open asset '" + p.string() + "' (set TRATES_ASSETS?)");
  return in;
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& p) {
  auto in = open(p);
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.insert(line);
  }
  return out;
}

}  // namespace

std::filesystem::path asset_dir() {
  if (const char* env = std::getenv("TRATES_ASSETS"); env && *env) return env;
  return TRATES_DEFAULT_ASSET_DIR;
}

Lexicons Lexicons::load(const std::filesystem::path& dir) {
  Lexicons lex;
  lex.stopwords = load_word_list(dir / "stopwords.txt");
  lex.dictionary = load_word_list(dir / "dictionary.txt");
  lex.dale_chall_easy = load_word_list(dir / "dale_chall_easy.txt");
  auto in = open(dir / "sentiment_lexicon.tsv");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("sentiment_lexicon.tsv: malformed line '" + line + "'");
    lex.polarity[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
  }
  return lex;
}

const Lexicons& Lexicons::shared() {
  static const Lexicons lex = load(asset_dir());
  return lex;
}

}  // namespace trates::text
