#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "trates/common/rng.hpp"
#include "trates/text/generic_features.hpp"
#include "trates/text/lexicons.hpp"
#include "trates/text/pos_tagger.hpp"
#include "trates/text/readability.hpp"
#include "trates/text/syllables.hpp"
#include "trates/text/tokenizer.hpp"

using namespace trates;
namespace tt = trates::testing;
using namespace trates::text;

namespace {

std::vector<std::string> words_of(const TokenizedEssay& e) {
  std::vector<std::string> out;
  for (const auto& s : e.sentences)
    for (const auto& t : s) out.push_back(t.text);
  return out;
}

}  // namespace

TEST(Tokenizer, SentencesAndClitics) {
  const auto e = tokenize("I don't know. It's late, Mr. Smith said! Really?");
  ASSERT_EQ(e.sentences.size(), 3u);
  EXPECT_EQ(words_of(e), (std::vector<std::string>{"I", "do", "n't", "know", ".", "It", "'s", "late",
                                                   ",", "Mr.", "Smith", "said", "!", "Really", "?"}));
}

TEST(Tokenizer, SpansCoverTheText) {
  const std::string text = "First line.\n\nSecond  paragraph without stop\nThird (one).";
  const auto e = tokenize(text);
  std::size_t prev = 0;
  for (const auto& s : e.sentences)
    for (const auto& t : s) {
      for (std::size_t i = prev; i < t.begin; ++i) EXPECT_TRUE(std::isspace(static_cast<unsigned char>(text[i])));
      EXPECT_EQ(text.substr(t.begin, t.end - t.begin), t.text);
      prev = t.end;
    }
  // the blank line closes the first sentence; a single newline does not
  EXPECT_EQ(e.sentences.size(), 2u);
}

TEST(Tokenizer, WordAndPunctPredicates) {
  EXPECT_TRUE(is_word_token("n't"));
  EXPECT_TRUE(is_word_token("1999"));
  EXPECT_FALSE(is_word_token("..."));
  EXPECT_TRUE(is_punct_token("--"));
  EXPECT_TRUE(is_abbreviation("Dr."));
  EXPECT_FALSE(is_abbreviation("dog."));
}

TEST(Syllables, AgreesWithPronouncingDictionary) {
  std::ifstream in(std::string(TRATES_TEST_DATA_DIR) + "/syllable_oracle.tsv");
  ASSERT_TRUE(in);
  std::string line;
  std::getline(in, line);
  std::size_t total = 0, exact = 0, off_by_more = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    const std::string word = line.substr(0, tab);
    const int want = std::stoi(line.substr(tab + 1));
    const int got = count_syllables(word);
    ++total;
    if (got == want) ++exact;
    if (std::abs(got - want) > 1) ++off_by_more;
  }
  ASSERT_GT(total, 400u);
  // A rule-based counter cannot match a pronouncing dictionary everywhere.
  EXPECT_GE(static_cast<double>(exact) / total, 0.9) << exact << "/" << total;
  EXPECT_LE(off_by_more, total / 100);
}

TEST(Syllables, Floor) {
  EXPECT_EQ(count_syllables("hmm"), 1);
  EXPECT_EQ(count_syllables("a"), 1);
}

TEST(Tagger, GoldAccuracy) {
  std::ifstream in(asset_dir() / "tagger" / "gold_fixtures.txt");
  ASSERT_TRUE(in);
  const auto& tagger = PerceptronTagger::shared();
  std::size_t total = 0, right = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> words, gold;
    std::string item;
    while (ss >> item) {
      const auto slash = item.rfind('/');
      words.push_back(item.substr(0, slash));
      gold.push_back(item.substr(slash + 1));
    }
    const auto tags = tagger.tag(words);
    ASSERT_EQ(tags.size(), gold.size());
    for (std::size_t i = 0; i < tags.size(); ++i, ++total) right += tags[i] == gold[i];
  }
  ASSERT_GT(total, 900u);
  EXPECT_GE(static_cast<double>(right) / total, 0.95) << right << "/" << total;
}

TEST(Tagger, TrainsOnToyData) {
  std::vector<TaggedSentence> data;
  for (int i = 0; i < 20; ++i) {
    data.push_back({{"the", "dog", "runs"}, {"DT", "NN", "VBZ"}});
    data.push_back({{"a", "cat", "sleeps"}, {"DT", "NN", "VBZ"}});
  }
  const auto t = PerceptronTagger::train(data, 5, 1);
  EXPECT_EQ(t.tag({"the", "cat", "runs"}), (std::vector<std::string>{"DT", "NN", "VBZ"}));
}

TEST(Readability, HandCountedFixtures) {
  const auto& lex = Lexicons::shared();
  for (const auto& f : trates::testing::readability_fixtures()) {
    SCOPED_TRACE(f.text);
    const auto s = compute_text_stats(tokenize(f.text), lex);
    EXPECT_EQ(s.words, f.words);
    EXPECT_EQ(s.sentences, f.sentences);
    EXPECT_EQ(s.syllables, f.syllables);
    EXPECT_EQ(s.characters, f.characters);
    EXPECT_EQ(s.long_words, f.long_words);
    EXPECT_EQ(s.complex_words, f.complex_words);
    EXPECT_EQ(s.difficult_words, f.difficult_words);
    const auto got = readability_from_stats(s);
    const auto want = trates::testing::hand_readability(f);
    EXPECT_NEAR(got.flesch_reading_ease, want.flesch, 1e-9);
    EXPECT_NEAR(got.kincaid, want.kincaid, 1e-9);
    EXPECT_NEAR(got.dale_chall, want.dale_chall, 1e-9);
    EXPECT_NEAR(got.smog, want.smog, 1e-9);
  }
}

TEST(Readability, SpellingErrorsCountUnknownWords) {
  const auto s = compute_text_stats(tokenize("The dgo sat on teh mat."), Lexicons::shared());
  EXPECT_EQ(s.spelling_errors, 2);
}

TEST(Readability, EmptyInputIsFloored) {
  const auto r = readability_from_stats(TextStats{});
  for (double v : r.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(GenericFeatures, RegistryContract) {
  const auto& reg = feature_registry();
  std::set<std::string_view> names;
  for (const auto& e : reg) {
    EXPECT_TRUE(names.insert(e.name).second) << e.name;
    EXPECT_NE(e.category, FeatureCategory::kTraitSpecific);
    EXPECT_NE(e.category, FeatureCategory::kPromptSpecific);
  }
  const GenericFeatureExtractor fx;
  EXPECT_EQ(fx.extract("A short essay. It has two sentences.").size(), reg.size());
  for (auto n : kReadabilityNames) EXPECT_TRUE(names.count(n)) << n;
  std::istringstream table(registry_table());
  std::size_t lines = 0;
  for (std::string l; std::getline(table, l);) ++lines;
  EXPECT_GE(lines, reg.size());
}

TEST(GenericFeatures, SerialEqualsParallel) {
  Rng rng(3);
  const char* words[] = {"I", "think", "computers", "are", "good", "bad", "because", "people",
                         "learn", "and", "friends", "happy", "never", "not", "which", "when"};
  std::vector<std::string> ids, texts;
  for (int i = 0; i < 40; ++i) {
    std::string t;
    for (int w = 0; w < 60; ++w) {
      t += words[rng.below(16)];
      t += (w % 9 == 8) ? ". " : " ";
    }
    ids.push_back("e" + std::to_string(i));
    texts.push_back(t);
  }
  const GenericFeatureExtractor fx;
  const auto a = extract_generic_serial(fx, ids, texts);
  const auto b = extract_generic_parallel(fx, ids, texts);
  EXPECT_EQ(a.row_ids(), b.row_ids());
  EXPECT_EQ(a.data(), b.data());
  for (double v : a.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(GenericFeatures, SentimentFollowsPolarityAndNegation) {
  const GenericFeatureExtractor fx;
  const auto& reg = feature_registry();
  auto col = [&](std::string_view n) {
    for (std::size_t i = 0; i < reg.size(); ++i)
      if (reg[i].name == n) return i;
    return reg.size();
  };
  const auto pos = fx.extract("This is a wonderful and happy day.");
  const auto neg = fx.extract("This is not a wonderful and happy day.");
  EXPECT_EQ(pos[col("positive_sentence_prop")], 1.0);
  EXPECT_LT(neg[col("positive_sentence_prop")], 1.0);
}
