#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trates::corpus {

enum class EssayType { kPersuasive, kNarrative, kSourceDependent, kOther };

std::string_view to_string(EssayType t);
std::optional<EssayType> parse_essay_type(std::string_view s);

/// Declared score grid of one trait on one prompt: {min, min+step, ..., max}.
struct ScoreRange {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  std::size_t grid_size() const;
  /// Index of `value` on the grid, or nullopt when it is off-grid or out of range.
  std::optional<std::size_t> grid_index(double value) const;
  double grid_value(std::size_t index) const { return min + step * static_cast<double>(index); }
  bool contains(double value) const { return grid_index(value).has_value(); }

  friend bool operator==(const ScoreRange&, const ScoreRange&) = default;
};

struct PromptSpec {
  std::string prompt_id;
  std::string task_description;
  EssayType essay_type = EssayType::kOther;
  double expected_length = 0.0;  // words
  double source_length = 0.0;    // words, 0 when the task has no source text
  int grade_level = 0;
  std::map<std::string, ScoreRange> score_ranges;  // trait -> range
  std::optional<std::size_t> expected_essay_count;

  const ScoreRange* range_for(std::string_view trait) const;
};

struct RubricDoc {
  std::string rubric_id;
  std::string trait;
  std::string body;
  std::vector<std::string> prompt_ids;
};

struct EssayRecord {
  std::string essay_id;
  std::string prompt_id;
  std::string text;
  std::map<std::string, double> trait_scores;

  std::optional<double> score(std::string_view trait) const;
};

/// Validated, immutable-after-load collection of prompts, rubrics and essays.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::vector<PromptSpec> prompts, std::vector<RubricDoc> rubrics,
          std::vector<EssayRecord> essays);

  const std::string& name() const noexcept { return name_; }
  const std::vector<PromptSpec>& prompts() const noexcept { return prompts_; }
  const std::vector<RubricDoc>& rubrics() const noexcept { return rubrics_; }
  const std::vector<EssayRecord>& essays() const noexcept { return essays_; }

  const PromptSpec& prompt(std::string_view prompt_id) const;
  const PromptSpec* find_prompt(std::string_view prompt_id) const;
  const RubricDoc& rubric(std::string_view rubric_id) const;
  /// The rubric used to score `trait` on `prompt_id`; throws when absent.
  const RubricDoc& rubric_for(std::string_view trait, std::string_view prompt_id) const;
  const EssayRecord& essay(std::string_view essay_id) const;

  /// Sorted prompt ids.
  std::vector<std::string> prompt_ids() const;
  /// Every trait scored on at least one prompt, sorted.
  std::vector<std::string> traits() const;
  /// Indices of essays that carry a score for `trait`, in load order.
  std::vector<std::size_t> essays_with_trait(std::string_view trait) const;
  /// Prompts that declare `trait`.
  std::vector<std::string> prompts_with_trait(std::string_view trait) const;
  /// Distinct grade levels present, ascending.
  std::vector<int> grade_levels() const;

  /// Canonical JSON dump; two loads of the same files serialize identically.
  std::string serialize() const;
  /// SHA-256 of serialize().
  std::string digest() const;

 private:
  void validate() const;
  void build_index();

  std::string name_;
  std::vector<PromptSpec> prompts_;
  std::vector<RubricDoc> rubrics_;
  std::vector<EssayRecord> essays_;
  std::map<std::string, std::size_t, std::less<>> prompt_index_;
  std::map<std::string, std::size_t, std::less<>> rubric_index_;
  std::map<std::string, std::size_t, std::less<>> essay_index_;
  std::map<std::pair<std::string, std::string>, std::size_t> trait_prompt_rubric_;
};

}  // namespace trates::corpus
