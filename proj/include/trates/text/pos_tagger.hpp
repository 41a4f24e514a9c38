#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace trates::text {

/// One tagged training sentence.
struct TaggedSentence {
  std::vector<std::string> words;
  std::vector<std::string> tags;
};

/// Greedy left-to-right averaged-perceptron tagger over the Penn tagset.
class PerceptronTagger {
 public:
  PerceptronTagger() = default;

  /// Loads a weights file (format "trates-perceptron-tagger 1").
  static PerceptronTagger load(const std::filesystem::path& path);
  /// The bundled model, loaded once from assets/.
  static const PerceptronTagger& shared();

  std::vector<std::string> tag(const std::vector<std::string>& words) const;

  /// Trains from scratch. Weights are averaged over all updates.
  static PerceptronTagger train(std::vector<TaggedSentence> data, int iterations,
                                std::uint64_t seed);

  void save(const std::filesystem::path& path, double prune_below = 0.0) const;

  std::size_t feature_count() const { return weights_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }

 private:
  using ClassWeights = std::vector<std::pair<std::uint16_t, float>>;

  std::string surface(std::size_t i, const std::string& word) const;
  std::uint16_t predict(const std::vector<std::string>& features) const;
  std::vector<std::string> features(std::size_t i, std::string_view word,
                                           const std::vector<std::string>& context,
                                           std::string_view prev, std::string_view prev2) const;

  std::vector<std::string> classes_;
  std::unordered_map<std::string, std::uint16_t> tagdict_;  // unambiguous words
  std::unordered_map<std::string, ClassWeights> weights_;
  std::unordered_set<std::string> lower_vocab_;  // seen lowercase mid-sentence
};

/// Word normalization used for tagger features.
std::string normalize_for_tagger(std::string_view word);

}  // namespace trates::text
