#include "trates/text/generic_features.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "trates/common/error.hpp"
#include "trates/corpus/text_normalize.hpp"
#include "trates/text/readability.hpp"
#include "trates/text/tokenizer.hpp"
#include "words.hpp"

namespace trates::text {

namespace {

using FC = FeatureCategory;

struct TagColumn {
  std::string_view tag, name, description;
};

constexpr std::array<TagColumn, 29> kTagColumns = {{
    {",", "prop_comma", "Share of tokens tagged ,"},
    {".", "prop_period", "Share of tokens tagged ."},
    {"VBG", "prop_VBG", "Share of tokens tagged VBG"},
    {"VBZ", "prop_VBZ", "Share of tokens tagged VBZ"},
    {"VBP", "prop_VBP", "Share of tokens tagged VBP"},
    {"VB", "prop_VB", "Share of tokens tagged VB"},
    {"VBD", "prop_VBD", "Share of tokens tagged VBD"},
    {"VBN", "prop_VBN", "Share of tokens tagged VBN"},
    {"NN", "prop_NN", "Share of tokens tagged NN"},
    {"NNP", "prop_NNP", "Share of tokens tagged NNP"},
    {"NNS", "prop_NNS", "Share of tokens tagged NNS"},
    {"JJ", "prop_JJ", "Share of tokens tagged JJ"},
    {"JJS", "prop_JJS", "Share of tokens tagged JJS"},
    {"RBR", "prop_RBR", "Share of tokens tagged RBR"},
    {"JJR", "prop_JJR", "Share of tokens tagged JJR"},
    {"RB", "prop_RB", "Share of tokens tagged RB"},
    {"WRB", "prop_WRB", "Share of tokens tagged WRB"},
    {"PRP", "prop_PRP", "Share of tokens tagged PRP"},
    {"WP", "prop_WP", "Share of tokens tagged WP"},
    {"PRP$", "prop_PRP$", "Share of tokens tagged PRP$"},
    {"IN", "prop_IN", "Share of tokens tagged IN"},
    {"MD", "prop_MD", "Share of tokens tagged MD"},
    {"RP", "prop_RP", "Share of tokens tagged RP"},
    {"CC", "prop_CC", "Share of tokens tagged CC"},
    {"TO", "prop_TO", "Share of tokens tagged TO"},
    {"WDT", "prop_WDT", "Share of tokens tagged WDT"},
    {"DT", "prop_DT", "Share of tokens tagged DT"},
    {"CD", "prop_CD", "Share of tokens tagged CD"},
    {"POS", "prop_POS", "Share of tokens tagged POS"},
}};

std::vector<RegistryEntry> build_registry() {
  std::vector<RegistryEntry> r = {
      {"mean_word", FC::kLength, "Mean length of word tokens in characters"},
      {"word_var", FC::kLength, "Variance of word-token length"},
      {"mean_sent", FC::kLength, "Mean sentence length in words"},
      {"sent_var", FC::kLength, "Variance of sentence length in words"},
      {"ess_char_len", FC::kLength, "Non-whitespace characters in the essay"},
      {"word_count", FC::kLength, "Number of words"},
      {"prep_comma", FC::kLength, "Prepositions (IN) plus commas"},
      {"characters_per_word", FC::kLength, "Letters and digits per word"},
      {"syll_per_word", FC::kLength, "Syllables per word"},
      {"type_token_ratio", FC::kLength, "Distinct lowercase words over words"},
      {"syllables", FC::kLength, "Total syllables"},
      {"wordtypes", FC::kLength, "Distinct lowercase words"},
      {"sentences", FC::kLength, "Number of sentences"},
      {"long_words", FC::kLength, "Words with at least 7 characters"},
      {"complex_words", FC::kLength, "Words with at least 3 syllables"},
      {"complex_words_dc", FC::kLength, "Words outside the Dale-Chall familiar list"},
      {"spelling_err", FC::kReadability, "Words missing from the bundled dictionary"},
      {"automated_readability", FC::kReadability, "Automated Readability Index"},
      {"linsear_write", FC::kReadability, "Linsear Write"},
      {"kincaid", FC::kReadability, "Flesch-Kincaid grade level"},
      {"coleman_liau", FC::kReadability, "Coleman-Liau index"},
      {"flesch_reading_ease", FC::kReadability, "Flesch Reading Ease"},
      {"gunning_fog", FC::kReadability, "Gunning Fog index"},
      {"lix", FC::kReadability, "LIX"},
      {"smog", FC::kReadability, "SMOG index"},
      {"rix", FC::kReadability, "RIX"},
      {"dale_chall", FC::kReadability, "New Dale-Chall score"},
      {"clause_per_s", FC::kComplexity, "Mean clauses per sentence"},
      {"mean_clause_l", FC::kComplexity, "Mean clause length in words"},
      {"max_clause_in_s", FC::kComplexity, "Most clauses in one sentence"},
      {"sent_ave_depth", FC::kComplexity, "Mean of per-sentence maximum depth"},
      {"ave_leaf_depth", FC::kComplexity, "Mean of per-sentence mean token depth"},
      {"unique_word", FC::kVariation, "Words occurring exactly once"},
      {"stop_prop", FC::kVariation, "Stop-word tokens over word tokens"},
  };
  for (const auto& c : kTagColumns) r.push_back({c.name, FC::kVariation, c.description});
  const std::vector<RegistryEntry> tail = {
      {"tobeverb", FC::kVariation, "Forms of 'be'"},
      {"auxverb", FC::kVariation, "Modals and be/have/do forms followed by a verb"},
      {"conjunction", FC::kVariation, "Coordinating conjunctions"},
      {"pronoun", FC::kVariation, "Personal, possessive and wh- pronouns"},
      {"preposition", FC::kVariation, "IN tokens other than subordinators"},
      {"nominalization", FC::kVariation, "Nouns with a nominalizing suffix"},
      {"begin_w_pronoun", FC::kVariation, "Sentences starting with a pronoun"},
      {"begin_w_interrogative", FC::kVariation, "Sentences starting with a wh-word"},
      {"begin_w_article", FC::kVariation, "Sentences starting with a, an or the"},
      {"begin_w_subordination", FC::kVariation, "Sentences starting with a subordinator"},
      {"begin_w_conjunction", FC::kVariation, "Sentences starting with a coordinator"},
      {"begin_w_preposition", FC::kVariation, "Sentences starting with a preposition"},
      {"positive_sentence_prop", FC::kSentiment, "Share of sentences with polarity > 0.1"},
      {"negative_sentence_prop", FC::kSentiment, "Share of sentences with polarity < -0.1"},
      {"neutral_sentence_prop", FC::kSentiment, "Share of remaining sentences"},
      {"overall_positivity_score", FC::kSentiment, "Positive polarity mass per word"},
      {"overall_negativity_score", FC::kSentiment, "Negative polarity mass per word"},
  };
  r.insert(r.end(), tail.begin(), tail.end());
  return r;
}

const std::unordered_set<std::string_view> kSubordinators = {
    "after", "although", "as", "because", "before", "if", "once", "since", "so", "than",
    "that", "though", "till", "unless", "until", "when", "whenever", "where", "whereas",
    "wherever", "whether", "while", "whilst"};
// Subordinators that never head a prepositional phrase.
const std::unordered_set<std::string_view> kPureSubordinators = {
    "although", "because", "if", "though", "unless", "whereas", "whether", "while", "whilst",
    "that", "once"};
const std::unordered_set<std::string_view> kInterrogatives = {
    "what", "who", "whom", "whose", "which", "when", "where", "why", "how"};
const std::unordered_set<std::string_view> kBeForms = {
    "be", "am", "is", "are", "was", "were", "been", "being", "'m", "'re"};
const std::unordered_set<std::string_view> kAuxForms = {
    "be", "am", "is", "are", "was", "were", "been", "being", "'m", "'re", "'s",
    "have", "has", "had", "having", "'ve", "'d", "do", "does", "did"};
const std::unordered_set<std::string_view> kNegators = {
    "not", "n't", "no", "never", "nothing", "nobody", "none", "neither", "nor",
    "cannot", "without", "hardly", "nowhere"};
constexpr std::array<std::string_view, 10> kNominalSuffixes = {
    "tion", "sion", "ment", "ness", "ance", "ence", "ity", "ancy", "ency", "ism"};
const std::unordered_set<std::string_view> kFinite = {"VBD", "VBP", "VBZ", "MD"};

bool is_wh(std::string_view tag) {
  return tag == "WDT" || tag == "WP" || tag == "WP$" || tag == "WRB";
}

bool is_punct_tag(std::string_view tag, std::string_view tok) {
  return tag == "," || tag == "." || tag == ":" || tag == "``" || tag == "''" || tag == "(" ||
         tag == ")" || tag == "-LRB-" || tag == "-RRB-" || tag == "#" || is_punct_token(tok);
}

template <typename C>
bool has(const C& set, std::string_view key) {
  return set.find(key) != set.end();
}

std::string fold_lower(std::string_view s) {
  std::string out = to_lower_ascii(s);
  // Curly apostrophe to ASCII, as in the clitic tokens.
  for (std::size_t p; (p = out.find("\xE2\x80\x99")) != std::string::npos;) out.replace(p, 3, "'");
  return out;
}

struct MeanVar {
  double n = 0, sum = 0, sq = 0;
  void add(double x) { n += 1, sum += x, sq += x * x; }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  // Population variance, computed from a two-pass-equivalent closed form.
  double var() const {
    if (n <= 0) return 0.0;
    const double m = mean();
    return std::max(0.0, sq / n - m * m);
  }
};

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

}  // namespace

const std::vector<RegistryEntry>& feature_registry() {
  static const std::vector<RegistryEntry> reg = build_registry();
  return reg;
}

std::vector<ColumnInfo> registry_columns() {
  std::vector<ColumnInfo> cols;
  for (const auto& e : feature_registry()) cols.push_back({std::string(e.name), e.category});
  return cols;
}

std::string registry_table() {
  std::ostringstream out;
  out << "name\tcategory\tdescription\n";
  for (const auto& e : feature_registry())
    out << e.name << '\t' << to_string(e.category) << '\t' << e.description << '\n';
  return out.str();
}

GenericFeatureExtractor::GenericFeatureExtractor()
    : lex_(Lexicons::shared()), tagger_(PerceptronTagger::shared()) {}

std::vector<double> GenericFeatureExtractor::extract(std::string_view raw) const {
  const std::string text = corpus::normalize_text(raw);
  if (!corpus::has_content(text)) throw ValidationError("cannot extract features from empty text");
  const TokenizedEssay essay = tokenize(text);
  const auto words = detail::sentence_words(essay);

  // Tag every sentence once.
  std::vector<std::vector<std::string>> tags;
  std::vector<std::vector<std::string>> lower;
  tags.reserve(essay.sentences.size());
  for (const auto& s : essay.sentences) {
    std::vector<std::string> surf;
    std::vector<std::string> low;
    for (const auto& t : s) {
      surf.push_back(t.text);
      low.push_back(fold_lower(t.text));
    }
    tags.push_back(tagger_.tag(surf));
    lower.push_back(std::move(low));
  }

  std::vector<double> out;
  out.reserve(feature_registry().size());

  // Length.
  MeanVar word_len, sent_len;
  double n_words = 0, chars = 0, syll = 0, long_words = 0, complex_words = 0, difficult = 0;
  std::unordered_map<std::string, int> freq;
  for (const auto& s : essay.sentences)
    for (const auto& t : s)
      if (is_word_token(t.text)) word_len.add(static_cast<double>(utf8_length(t.text)));
  for (const auto& sw : words) {
    sent_len.add(static_cast<double>(sw.size()));
    for (const auto& w : sw) {
      n_words += 1;
      chars += w.chars;
      syll += w.syllables;
      long_words += w.chars >= 7;
      complex_words += w.syllables >= 3;
      difficult += !detail::is_familiar(w, lex_);
      ++freq[w.lower];
    }
  }
  double nonspace = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if ((c & 0xC0) == 0x80) continue;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') continue;
    nonspace += 1;
  }
  double in_tags = 0, commas = 0, total_tokens = 0;
  for (std::size_t si = 0; si < tags.size(); ++si)
    for (std::size_t i = 0; i < tags[si].size(); ++i) {
      total_tokens += 1;
      in_tags += tags[si][i] == "IN";
      commas += essay.sentences[si][i].text == ",";
    }
  const double w_floor = std::max(n_words, 1.0);
  const double types = static_cast<double>(freq.size());
  out.push_back(word_len.mean());
  out.push_back(word_len.var());
  out.push_back(sent_len.mean());
  out.push_back(sent_len.var());
  out.push_back(nonspace);
  out.push_back(n_words);
  out.push_back(in_tags + commas);
  out.push_back(chars / w_floor);
  out.push_back(syll / w_floor);
  out.push_back(types / w_floor);
  out.push_back(syll);
  out.push_back(types);
  out.push_back(static_cast<double>(essay.sentences.size()));
  out.push_back(long_words);
  out.push_back(complex_words);
  out.push_back(difficult);

  // Readability.
  for (double v : readability_scores(essay, lex_).values()) out.push_back(v);

  // Complexity: clause counts and a punctuation/conjunction bracketing.
  double clauses_total = 0, max_clauses = 0, depth_max_sum = 0, depth_mean_sum = 0;
  for (std::size_t si = 0; si < tags.size(); ++si) {
    const auto& tg = tags[si];
    const auto& lw = lower[si];
    const bool question = !lw.empty() && lw.back() == "?";
    std::vector<bool> opener(tg.size(), false);
    for (std::size_t i = 0; i < tg.size(); ++i) {
      const bool sub = has(kSubordinators, lw[i]) && (tg[i] == "IN" || tg[i] == "WRB");
      const bool rel = is_wh(tg[i]) && !(i == 0 && question);
      if (!(sub || rel) || tg[i] == "DT") continue;
      for (std::size_t j = i + 1; j < tg.size(); ++j)
        if (has(kFinite, tg[j])) {
          opener[i] = true;
          break;
        }
    }
    double clauses = 1;
    for (bool o : opener) clauses += o;
    clauses_total += clauses;
    max_clauses = std::max(max_clauses, clauses);

    int level = 1, deepest = 0;
    double leaf_sum = 0;
    for (std::size_t i = 0; i < tg.size(); ++i) {
      int d;
      if (is_punct_tag(tg[i], essay.sentences[si][i].text) || tg[i] == "CC") {
        d = 2;
        level = 1;
      } else {
        if (opener[i] || tg[i] == "IN") ++level;
        d = level + 1;
      }
      deepest = std::max(deepest, d);
      leaf_sum += d;
    }
    depth_max_sum += deepest;
    depth_mean_sum += tg.empty() ? 0.0 : leaf_sum / static_cast<double>(tg.size());
  }
  const double n_sent = std::max(static_cast<double>(tags.size()), 1.0);
  out.push_back(clauses_total / n_sent);
  out.push_back(clauses_total > 0 ? n_words / clauses_total : 0.0);
  out.push_back(max_clauses);
  out.push_back(depth_max_sum / n_sent);
  out.push_back(depth_mean_sum / n_sent);

  // Variation.
  double hapax = 0;
  for (const auto& [w, c] : freq) hapax += c == 1;
  double stop = 0, word_tokens = 0;
  std::map<std::string_view, double> tag_counts;
  double tobe = 0, aux = 0, conj = 0, pron = 0, prep = 0, nominal = 0;
  double b_pron = 0, b_wh = 0, b_art = 0, b_sub = 0, b_conj = 0, b_prep = 0;
  for (std::size_t si = 0; si < tags.size(); ++si) {
    const auto& tg = tags[si];
    const auto& lw = lower[si];
    std::size_t first = tg.size();
    for (std::size_t i = 0; i < tg.size(); ++i) {
      const std::string& t = tg[i];
      const std::string& w = lw[i];
      ++tag_counts[t];
      if (is_word_token(w)) {
        word_tokens += 1;
        stop += lex_.stopwords.count(w) > 0;
        if (first == tg.size()) first = i;
      }
      if (has(kBeForms, w) || (w == "'s" && t == "VBZ")) tobe += 1;
      if (t == "MD") {
        aux += 1;
      } else if (has(kAuxForms, w)) {
        std::size_t j = i + 1;
        while (j < tg.size() && (tg[j] == "RB" || tg[j] == "PRP")) ++j;
        if (j < tg.size() && tg[j].rfind("VB", 0) == 0) aux += 1;
      }
      conj += t == "CC";
      pron += t == "PRP" || t == "PRP$" || t == "WP" || t == "WP$";
      prep += t == "IN" && !has(kPureSubordinators, w);
      if (t == "NN" || t == "NNS") {
        std::string_view stem = w;
        if (t == "NNS" && stem.size() > 1 && stem.back() == 's') stem.remove_suffix(1);
        for (auto suf : kNominalSuffixes)
          if (stem.size() >= suf.size() + 3 && stem.substr(stem.size() - suf.size()) == suf) {
            nominal += 1;
            break;
          }
      }
    }
    if (first < tg.size()) {
      const std::string& t = tg[first];
      const std::string& w = lw[first];
      b_pron += t == "PRP";
      b_wh += has(kInterrogatives, w);
      b_art += w == "a" || w == "an" || w == "the";
      b_sub += has(kSubordinators, w) && t != "DT" && t != "RB";
      b_conj += t == "CC";
      b_prep += t == "IN" && !has(kSubordinators, w);
    }
  }
  const double tok_floor = std::max(total_tokens, 1.0);
  out.push_back(hapax);
  out.push_back(word_tokens > 0 ? stop / word_tokens : 0.0);
  for (const auto& c : kTagColumns) {
    auto it = tag_counts.find(c.tag);
    out.push_back(it == tag_counts.end() ? 0.0 : it->second / tok_floor);
  }
  for (double v : {tobe, aux, conj, pron, prep, nominal, b_pron, b_wh, b_art, b_sub, b_conj, b_prep})
    out.push_back(v);

  // Sentiment: lexicon polarity with negation flipping over the previous 3 tokens.
  double pos_s = 0, neg_s = 0, neu_s = 0, pos_mass = 0, neg_mass = 0;
  for (const auto& lw : lower) {
    double score = 0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
      auto it = lex_.polarity.find(lw[i]);
      if (it == lex_.polarity.end()) continue;
      double p = it->second;
      for (std::size_t k = 1; k <= 3 && k <= i; ++k)
        if (has(kNegators, lw[i - k])) {
          p = -p;
          break;
        }
      score += p;
      if (p > 0) pos_mass += p;
      else neg_mass -= p;
    }
    if (score > 0.1) pos_s += 1;
    else if (score < -0.1) neg_s += 1;
    else neu_s += 1;
  }
  out.push_back(pos_s / n_sent);
  out.push_back(neg_s / n_sent);
  out.push_back(neu_s / n_sent);
  out.push_back(pos_mass / w_floor);
  out.push_back(neg_mass / w_floor);

  if (out.size() != feature_registry().size())
    throw DimensionError("generic feature vector does not match the registry");
  return out;
}

FeatureMatrix extract_generic_serial(const GenericFeatureExtractor& fx,
                                     std::span<const std::string> ids,
                                     std::span<const std::string> texts) {
  if (ids.size() != texts.size()) throw DimensionError("ids and texts differ in length");
  FeatureMatrix m(registry_columns());
  for (std::size_t i = 0; i < texts.size(); ++i) m.add_row(ids[i], fx.extract(texts[i]));
  return m;
}

FeatureMatrix extract_generic_parallel(const GenericFeatureExtractor& fx,
                                       std::span<const std::string> ids,
                                       std::span<const std::string> texts) {
  if (ids.size() != texts.size()) throw DimensionError("ids and texts differ in length");
  std::vector<std::vector<double>> rows(texts.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)] = fx.extract(texts[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(trates_generic_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  FeatureMatrix m(registry_columns());
  for (std::size_t i = 0; i < rows.size(); ++i) m.add_row(ids[i], rows[i]);
  return m;
}

}  // namespace trates::text
