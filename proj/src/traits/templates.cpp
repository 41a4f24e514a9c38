#include <algorithm>
#include <sstream>

#include "trates/traits/traits.hpp"

namespace trates::traits {

namespace {

std::string s(std::string_view v) { return std::string(v); }

}  // namespace

RenderedPrompt render_question_prompt(std::string_view trait, std::string_view grade_range,
                                      std::string_view rubric) {
  RenderedPrompt p;
  p.template_id = s(kQuestionTemplateId);
  p.substitutions = {{"trait", s(trait)}, {"grade_range", s(grade_range)}, {"rubric", s(rubric)}};
  p.instruction =
      "Your task is to formulate a set of assessment questions from the given rubric to be used "
      "to evaluate the " + s(trait) + " of essays written by " + s(grade_range) +
      " grade students.\n"
      "\n"
      "Here are some instructions to follow:\n"
      "- Formulate the questions to rate the essay's aspects as High/Medium/Low\n"
      "- The questions should start with \"How would you rate ...\".\n"
      "- Keep the questions short and concise.\n"
      "- Each question should address only one scoring criterion from the rubric.\n"
      "- Structure your response in a numbered list from 1 to n, as follows:\n"
      "1- <question 1?>\n"
      "n- <question n?>";
  p.user_content = "Rubric: " + s(rubric) + "\n\nQuestions:";
  return p;
}

RenderedPrompt render_answer_prompt(std::string_view essay_type, std::string_view grade_level,
                                    std::string_view trait, std::string_view task_prompt,
                                    std::string_view essay_text, std::string_view question) {
  RenderedPrompt p;
  p.template_id = s(kAnswerTemplateId);
  p.substitutions = {{"essay_type", s(essay_type)},   {"grade_level", s(grade_level)},
                     {"trait", s(trait)},             {"task_prompt", s(task_prompt)},
                     {"essay_text", s(essay_text)},   {"question", s(question)}};
  p.instruction =
      "You will be given a " + s(essay_type) +
      " essay written in response to the given prompt by a student in " + s(grade_level) +
      "th grade. Your task is to answer an assessment question with high/medium/low to "
      "evaluate the " + s(trait) + " of the essay.\n"
      "---\n"
      "\n"
      "Follow the following format.\n"
      "Prompt: the topic to which the essay responds.\n"
      "Essay: the essay you need to evaluate.\n"
      "Assessment Question: the question you need to answer about the essay.\n"
      "Answer (High, Medium, or Low): your answer to the question.";
  p.user_content = "Prompt: " + s(task_prompt) + "\n\nEssay: " + s(essay_text) +
                   "\n\nEvaluation Question: " + s(question) +
                   "\n\nAnswer (High, Medium, or Low):";
  return p;
}

RenderedPrompt render_direct_prompt(std::string_view essay_type, std::string_view trait,
                                    std::string_view task_prompt, std::string_view rubric,
                                    std::string_view essay_text) {
  RenderedPrompt p;
  p.template_id = s(kDirectTemplateId);
  p.substitutions = {{"essay_type", s(essay_type)},
                     {"trait", s(trait)},
                     {"task_prompt", s(task_prompt)},
                     {"trait_rubric", s(rubric)},
                     {"essay_text", s(essay_text)}};
  p.instruction =
      "You will be given a " + s(essay_type) +
      " essay written in response to the given prompt. Your task is to score the " + s(trait) +
      " of the essay as per the given rubric.\n"
      "---\n"
      "\n"
      "Follow the following format.\n"
      "Prompt: the topic to which the essay responds.\n"
      "Rubric: the grading rubric to score the essay.\n"
      "Essay: the essay you need to evaluate.\n"
      "Score: the score of the essay as per the given rubric (only one number).";
  p.user_content = "Prompt: " + s(task_prompt) + "\n\nRubric: " + s(rubric) +
                   "\n\nEssay: " + s(essay_text) + "\n\nScore:";
  return p;
}

std::string ordinal_suffix(int n) {
  const int m100 = n % 100;
  const char* suf = "th";
  if (m100 < 11 || m100 > 13) {
    if (n % 10 == 1) suf = "st";
    else if (n % 10 == 2) suf = "nd";
    else if (n % 10 == 3) suf = "rd";
  }
  return std::to_string(n) + suf;
}

std::string grade_range_text(std::span<const int> grades) {
  if (grades.empty()) throw ValidationError("grade range needs at least one grade");
  const auto [lo, hi] = std::minmax_element(grades.begin(), grades.end());
  if (*lo == *hi) return ordinal_suffix(*lo);
  return ordinal_suffix(*lo) + " to " + ordinal_suffix(*hi);
}

std::string essay_type_text(corpus::EssayType t) {
  switch (t) {
    case corpus::EssayType::kPersuasive: return "persuasive";
    case corpus::EssayType::kNarrative: return "narrative";
    case corpus::EssayType::kSourceDependent: return "source-dependent";
    case corpus::EssayType::kOther: return "student";
  }
  return "student";
}

}  // namespace trates::traits
