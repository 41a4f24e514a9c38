#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trates/common/feature_matrix.hpp"
#include "trates/corpus/types.hpp"
#include "trates/gateway/gateway.hpp"

namespace trates::traits {

/// Bumped whenever template wording changes; part of every cache key.
inline constexpr std::string_view kTemplateVersion = "1";
inline constexpr std::string_view kQuestionTemplateId = "question-generation";
inline constexpr std::string_view kAnswerTemplateId = "question-answering";
inline constexpr std::string_view kDirectTemplateId = "direct-scoring";

using Substitutions = std::vector<std::pair<std::string, std::string>>;

struct RenderedPrompt {
  std::string template_id;
  Substitutions substitutions;
  std::string instruction;   // system message
  std::string user_content;  // user message
};

RenderedPrompt render_question_prompt(std::string_view trait, std::string_view grade_range,
                                      std::string_view rubric);
RenderedPrompt render_answer_prompt(std::string_view essay_type, std::string_view grade_level,
                                    std::string_view trait, std::string_view task_prompt,
                                    std::string_view essay_text, std::string_view question);
RenderedPrompt render_direct_prompt(std::string_view essay_type, std::string_view trait,
                                    std::string_view task_prompt, std::string_view rubric,
                                    std::string_view essay_text);

/// "7th to 10th" for grades {7, 8, 10}; "8th" for a single grade.
std::string grade_range_text(std::span<const int> grades);
std::string ordinal_suffix(int n);
/// Template wording for an essay type ("source-dependent", ...).
std::string essay_type_text(corpus::EssayType t);

struct AssessmentQuestion {
  std::string question_id;  // rubric_id#ordinal
  std::string trait;
  std::string rubric_id;
  int ordinal = 0;
  std::string text;

  /// Feature column name.
  std::string column() const { return "q:" + question_id; }
  friend bool operator==(const AssessmentQuestion&, const AssessmentQuestion&) = default;
};

enum class Rating { kLow = 1, kMedium = 2, kHigh = 3 };

constexpr int numeric(Rating r) noexcept { return static_cast<int>(r); }
Rating rating_from_numeric(int v);
std::string_view to_string(Rating r);

/// First standalone, case-insensitive high/medium/low token. An echoed option
/// list naming all three levels is skipped; a list naming exactly two
/// ("high/low", "medium or high") is ambiguous and rejected.
Rating parse_rating(std::string_view text);

/// Numbered lines ("1- ...", "2. ...", "3) ...") in order. Throws ParseError when
/// no line parses or a number repeats.
std::vector<std::string> parse_question_list(std::string_view text);

/// First number in `text`, rounded half away from zero onto the grid and
/// clamped to the range.
double parse_direct_score(std::string_view text, const corpus::ScoreRange& range);

/// Generated questions for one rubric, as persisted on disk.
struct QuestionBatch {
  std::string model_id;
  std::string template_version{kTemplateVersion};
  std::string rubric_id;
  std::string trait;
  std::string grade_range;
  std::string raw_response;
  std::string config_digest;
  std::vector<AssessmentQuestion> questions;

  std::string to_json() const;
  static QuestionBatch from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static QuestionBatch load(const std::filesystem::path& path);
};

/// Renders the generation template, parses the list and retries once when it
/// yields nothing.
QuestionBatch generate_questions(gateway::Gateway& gw, const std::string& model_id,
                                 const corpus::RubricDoc& rubric, const std::string& trait,
                                 const std::string& grade_range, bool refresh = false);

/// Rates one essay on one question; one retry on an unparseable answer, then
/// a ParseError carrying the raw response.
Rating answer_question(gateway::Gateway& gw, const std::string& model_id,
                       const corpus::EssayRecord& essay, const corpus::PromptSpec& prompt,
                       const AssessmentQuestion& question, const std::string& trait);

/// Questions of the listed batches, sorted by rubric_id then ordinal.
std::vector<AssessmentQuestion> ordered_questions(std::span<const QuestionBatch> batches);

struct TraitExtractionOptions {
  bool impute = true;
  double impute_value = 2.0;
  int concurrency = 8;
};

struct TraitBlock {
  FeatureMatrix matrix;
  std::vector<std::size_t> imputed;  // per column
  std::size_t imputed_total() const;
};

/// One column per question (in the given order) and one row per essay.
TraitBlock extract_trait_matrix(gateway::Gateway& gw, const std::string& model_id,
                                const corpus::Dataset& data, std::span<const std::size_t> essays,
                                std::span<const AssessmentQuestion> questions,
                                const std::string& trait, const TraitExtractionOptions& opt = {});

/// Zero-shot score on the trait's raw grid; one retry when no number is found.
double llm_direct_score(gateway::Gateway& gw, const std::string& model_id,
                        const corpus::EssayRecord& essay, const corpus::PromptSpec& prompt,
                        const corpus::RubricDoc& rubric, const std::string& trait);

}  // namespace trates::traits
