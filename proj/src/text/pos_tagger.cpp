#include "trates/text/pos_tagger.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "trates/common/error.hpp"
#include "trates/common/rng.hpp"
#include "trates/text/lexicons.hpp"
#include "trates/text/tokenizer.hpp"

namespace trates::text {

namespace {

constexpr std::string_view kMagic = "trates-perceptron-tagger 1";

std::string suffix(std::string_view w, std::size_t n) {
  return std::string(w.size() > n ? w.substr(w.size() - n) : w);
}

std::string shape(std::string_view w) {
  std::string s;
  for (char c : w) {
    const auto u = static_cast<unsigned char>(c);
    char k = std::isupper(u) ? 'X' : std::islower(u) ? 'x' : std::isdigit(u) ? 'd' : c;
    if (static_cast<unsigned char>(k) >= 0x80) k = 'u';
    if (s.empty() || s.back() != k) s.push_back(k);
    if (s.size() >= 4) break;
  }
  return s;
}

}  // namespace

std::string normalize_for_tagger(std::string_view word) {
  if (word.find('-') != std::string_view::npos && word.front() != '-') return "!HYPHEN";
  if (word.size() == 4 && std::all_of(word.begin(), word.end(),
                                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return "!YEAR";
  if (!word.empty() && std::isdigit(static_cast<unsigned char>(word.front()))) return "!DIGITS";
  std::string out(word);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> PerceptronTagger::features(std::size_t i, std::string_view word,
                                                    const std::vector<std::string>& ctx,
                                                    std::string_view prev,
                                                    std::string_view prev2) const {
  // ctx is padded with two start and two end markers; i indexes the unpadded word.
  const std::size_t k = i + 2;
  std::vector<std::string> f;
  f.reserve(18);
  auto add = [&f](std::string_view name, std::string_view a, std::string_view b = {}) {
    std::string s(name);
    s.push_back(' ');
    s.append(a);
    if (!b.empty()) {
      s.push_back(' ');
      s.append(b);
    }
    f.push_back(std::move(s));
  };
  f.emplace_back("bias");
  add("i suffix", suffix(word, 3));
  add("i suffix2", suffix(word, 2));
  add("i pref1", word.substr(0, 1));
  add("i shape", shape(word));
  add("i-1 tag", prev);
  add("i-2 tag", prev2);
  add("i tag+i-2 tag", prev, prev2);
  add("i word", ctx[k]);
  add("i-1 tag+i word", prev, ctx[k]);
  add("i-1 word", ctx[k - 1]);
  add("i-1 suffix", suffix(ctx[k - 1], 3));
  add("i-2 word", ctx[k - 2]);
  add("i+1 word", ctx[k + 1]);
  add("i+1 suffix", suffix(ctx[k + 1], 3));
  add("i+2 word", ctx[k + 2]);
  return f;
}

std::string PerceptronTagger::surface(std::size_t i, const std::string& word) const {
  // A capitalized sentence-initial word is read in lowercase when that form
  // is a known common word, so "Laughter is ..." is not taken for a name.
  if (i != 0 || word.empty() || !std::isupper(static_cast<unsigned char>(word[0]))) return word;
  std::string lower = to_lower_ascii(word);
  return lower_vocab_.count(lower) ? lower : word;
}

std::uint16_t PerceptronTagger::predict(const std::vector<std::string>& feats) const {
  std::vector<double> scores(classes_.size(), 0.0);
  for (const auto& feat : feats) {
    auto it = weights_.find(feat);
    if (it == weights_.end()) continue;
    for (const auto& [cls, w] : it->second) scores[cls] += w;
  }
  std::uint16_t best = 0;
  for (std::uint16_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

std::vector<std::string> PerceptronTagger::tag(const std::vector<std::string>& words) const {
  std::vector<std::string> out;
  out.reserve(words.size());
  if (words.empty()) return out;
  std::vector<std::string> ctx;
  ctx.reserve(words.size() + 4);
  ctx.emplace_back("-START-");
  ctx.emplace_back("-START2-");
  for (const auto& w : words) ctx.push_back(normalize_for_tagger(w));
  ctx.emplace_back("-END-");
  ctx.emplace_back("-END2-");
  std::string prev = "-START-", prev2 = "-START2-";
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string w = surface(i, words[i]);
    std::string t;
    if (auto it = tagdict_.find(w); it != tagdict_.end()) {
      t = classes_[it->second];
    } else {
      t = classes_[predict(features(i, w, ctx, prev, prev2))];
    }
    prev2 = std::move(prev);
    prev = t;
    out.push_back(std::move(t));
  }
  return out;
}

PerceptronTagger PerceptronTagger::train(std::vector<TaggedSentence> data, int iterations,
                                         std::uint64_t seed) {
  PerceptronTagger model;
  std::map<std::string, std::uint16_t> class_index;
  std::unordered_map<std::string, std::map<std::string, int>> counts;
  for (const auto& s : data) {
    if (s.words.size() != s.tags.size()) throw DimensionError("tagged sentence length mismatch");
    for (std::size_t i = 1; i < s.words.size(); ++i)
      if (std::islower(static_cast<unsigned char>(s.words[i][0])) && s.tags[i] != "NNP")
        model.lower_vocab_.insert(s.words[i]);
  }
  for (const auto& s : data) {
    for (std::size_t i = 0; i < s.words.size(); ++i) {
      class_index.emplace(s.tags[i], 0);
      ++counts[model.surface(i, s.words[i])][s.tags[i]];
    }
  }
  std::uint16_t next = 0;
  for (auto& [tag, idx] : class_index) {
    idx = next++;
    model.classes_.push_back(tag);
  }
  // Frequent, (nearly) unambiguous words are looked up instead of predicted.
  for (const auto& [word, tags] : counts) {
    int total = 0, best = 0;
    std::string best_tag;
    for (const auto& [t, n] : tags) {
      total += n;
      if (n > best) best = n, best_tag = t;
    }
    if (total >= 20 && static_cast<double>(best) / total >= 0.97)
      model.tagdict_[word] = class_index.at(best_tag);
  }

  struct Param {
    double w = 0, total = 0;
    long long stamp = 0;
  };
  std::unordered_map<std::string, std::unordered_map<std::uint16_t, Param>> params;
  long long instances = 0;
  const std::size_t n_classes = model.classes_.size();

  Rng rng(seed);
  for (int it = 0; it < iterations; ++it) {
    for (const auto& s : data) {
      std::vector<std::string> ctx = {"-START-", "-START2-"};
      for (const auto& w : s.words) ctx.push_back(normalize_for_tagger(w));
      ctx.emplace_back("-END-");
      ctx.emplace_back("-END2-");
      std::string prev = "-START-", prev2 = "-START2-";
      for (std::size_t i = 0; i < s.words.size(); ++i) {
        const std::string w = model.surface(i, s.words[i]);
        std::string guess;
        if (auto td = model.tagdict_.find(w); td != model.tagdict_.end()) {
          guess = model.classes_[td->second];
        } else {
          const auto feats = model.features(i, w, ctx, prev, prev2);
          std::vector<double> scores(n_classes, 0.0);
          for (const auto& f : feats) {
            auto p = params.find(f);
            if (p == params.end()) continue;
            for (const auto& [c, par] : p->second) scores[c] += par.w;
          }
          std::uint16_t best = 0;
          for (std::uint16_t c = 1; c < n_classes; ++c)
            if (scores[c] > scores[best]) best = c;
          guess = model.classes_[best];
          ++instances;
          const std::uint16_t truth = class_index.at(s.tags[i]);
          if (best != truth) {
            for (const auto& f : feats) {
              auto& row = params[f];
              for (auto [c, delta] : {std::pair{truth, 1.0}, std::pair{best, -1.0}}) {
                Param& par = row[c];
                par.total += static_cast<double>(instances - par.stamp) * par.w;
                par.stamp = instances;
                par.w += delta;
              }
            }
          }
        }
        prev2 = std::move(prev);
        prev = guess;
      }
    }
    rng.shuffle(data);
  }

  for (auto& [feat, row] : params) {
    ClassWeights cw;
    for (auto& [c, par] : row) {
      const double total = par.total + static_cast<double>(instances - par.stamp) * par.w;
      const double avg = instances > 0 ? total / static_cast<double>(instances) : 0.0;
      if (avg != 0.0) cw.emplace_back(c, static_cast<float>(avg));
    }
    std::sort(cw.begin(), cw.end());
    if (!cw.empty()) model.weights_.emplace(feat, std::move(cw));
  }
  return model;
}

void PerceptronTagger::save(const std::filesystem::path& path, double prune_below) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write tagger weights to '" + path.string() + "'");
  out << kMagic << '\n';
  out << "classes " << classes_.size();
  for (const auto& c : classes_) out << ' ' << c;
  out << '\n';
  std::vector<std::pair<std::string, std::uint16_t>> td(tagdict_.begin(), tagdict_.end());
  std::sort(td.begin(), td.end());
  out << "tagdict " << td.size() << '\n';
  for (const auto& [w, c] : td) out << w << '\t' << classes_[c] << '\n';
  std::vector<std::string> vocab(lower_vocab_.begin(), lower_vocab_.end());
  std::sort(vocab.begin(), vocab.end());
  out << "vocab " << vocab.size() << '\n';
  for (const auto& w : vocab) out << w << '\n';
  std::vector<std::string> keys;
  for (const auto& [f, cw] : weights_) {
    bool any = false;
    for (const auto& [c, w] : cw) any = any || std::abs(w) >= prune_below;
    if (any) keys.push_back(f);
  }
  std::sort(keys.begin(), keys.end());
  out << "weights " << keys.size() << '\n';
  char buf[32];
  for (const auto& f : keys) {
    out << f;
    bool first = true;
    for (const auto& [c, w] : weights_.at(f)) {
      if (std::abs(w) < prune_below) continue;
      std::snprintf(buf, sizeof buf, "%.4g", static_cast<double>(w));
      out << (first ? '\t' : ' ') << c << ':' << buf;
      first = false;
    }
    out << '\n';
  }
}

PerceptronTagger PerceptronTagger::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tagger weights '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ParseError("tagger weights: bad header in '" + path.string() + "'");
  PerceptronTagger m;
  {
    std::getline(in, line);
    std::istringstream ss(line);
    std::string key;
    std::size_t n = 0;
    ss >> key >> n;
    if (key != "classes") throw ParseError("tagger weights: expected classes line");
    m.classes_.resize(n);
    for (auto& c : m.classes_) ss >> c;
  }
  std::unordered_map<std::string, std::uint16_t> idx;
  for (std::uint16_t i = 0; i < m.classes_.size(); ++i) idx[m.classes_[i]] = i;
  auto count_line = [&](std::string_view expect) {
    std::getline(in, line);
    std::istringstream ss(line);
    std::string key;
    std::size_t n = 0;
    ss >> key >> n;
    if (key != expect) throw ParseError("tagger weights: expected '" + std::string(expect) + "'");
    return n;
  };
  const std::size_t n_td = count_line("tagdict");
  for (std::size_t i = 0; i < n_td && std::getline(in, line); ++i) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("tagger weights: malformed tagdict line");
    m.tagdict_[line.substr(0, tab)] = idx.at(line.substr(tab + 1));
  }
  const std::size_t n_v = count_line("vocab");
  for (std::size_t i = 0; i < n_v && std::getline(in, line); ++i) m.lower_vocab_.insert(line);
  const std::size_t n_w = count_line("weights");
  m.weights_.reserve(n_w);
  for (std::size_t i = 0; i < n_w && std::getline(in, line); ++i) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("tagger weights: malformed weight line");
    ClassWeights cw;
    const char* p = line.c_str() + tab + 1;
    while (*p) {
      char* end = nullptr;
      const long c = std::strtol(p, &end, 10);
      if (*end != ':') throw ParseError("tagger weights: malformed weight entry");
      p = end + 1;
      const float w = std::strtof(p, &end);
      cw.emplace_back(static_cast<std::uint16_t>(c), w);
      p = end;
      while (*p == ' ') ++p;
    }
    m.weights_.emplace(line.substr(0, tab), std::move(cw));
  }
  return m;
}

const PerceptronTagger& PerceptronTagger::shared() {
  static const PerceptronTagger tagger = load(asset_dir() / "tagger" / "perceptron_weights.txt");
  return tagger;
}

}  // namespace trates::text
