#include <algorithm>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "trates/traits/traits.hpp"

namespace trates::traits {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kBatchFormat = "trates-question-batch";

gateway::CompletionRequest make_request(const std::string& model_id, RenderedPrompt p,
                                        int max_tokens, int attempt) {
  gateway::CompletionRequest req;
  req.model_id = model_id;
  req.template_id = std::move(p.template_id);
  req.template_version = std::string(kTemplateVersion);
  req.substitutions = std::move(p.substitutions);
  if (attempt > 1) req.substitutions.emplace_back("attempt", std::to_string(attempt));
  req.instruction = std::move(p.instruction);
  req.user_content = std::move(p.user_content);
  req.max_tokens = max_tokens;
  return req;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::string QuestionBatch::to_json() const {
  ordered_json j;
  j["format"] = kBatchFormat;
  j["version"] = 1;
  j["model_id"] = model_id;
  j["template_id"] = kQuestionTemplateId;
  j["template_version"] = template_version;
  j["rubric_id"] = rubric_id;
  j["trait"] = trait;
  j["grade_range"] = grade_range;
  j["config_digest"] = config_digest;
  j["raw_response"] = raw_response;
  j["questions"] = ordered_json::array();
  for (const auto& q : questions)
    j["questions"].push_back({{"question_id", q.question_id}, {"ordinal", q.ordinal}, {"text", q.text}});
  return j.dump(2) + "\n";
}

QuestionBatch QuestionBatch::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kBatchFormat)
      throw ParseError("not a question batch file");
    QuestionBatch b;
    b.model_id = j.at("model_id").get<std::string>();
    b.template_version = j.at("template_version").get<std::string>();
    b.rubric_id = j.at("rubric_id").get<std::string>();
    b.trait = j.at("trait").get<std::string>();
    b.grade_range = j.value("grade_range", "");
    b.config_digest = j.value("config_digest", "");
    b.raw_response = j.value("raw_response", "");
    int expect = 1;
    for (const auto& q : j.at("questions")) {
      AssessmentQuestion aq;
      aq.rubric_id = b.rubric_id;
      aq.trait = b.trait;
      aq.ordinal = q.at("ordinal").get<int>();
      aq.question_id = q.at("question_id").get<std::string>();
      aq.text = q.at("text").get<std::string>();
      if (aq.ordinal != expect++ || aq.text.empty())
        throw ParseError("question batch has gaps or empty questions");
      b.questions.push_back(std::move(aq));
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed question batch: ") + e.what());
  }
}

void QuestionBatch::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << to_json();
  }
  std::filesystem::rename(tmp, path);
}

QuestionBatch QuestionBatch::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read question batch " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

QuestionBatch generate_questions(gateway::Gateway& gw, const std::string& model_id,
                                 const corpus::RubricDoc& rubric, const std::string& trait,
                                 const std::string& grade_range, bool refresh) {
  if (rubric.body.empty()) throw ValidationError("rubric " + rubric.rubric_id + " has an empty body");
  QuestionBatch b;
  b.model_id = model_id;
  b.rubric_id = rubric.rubric_id;
  b.trait = trait;
  b.grade_range = grade_range;
  std::vector<std::string> texts;
  for (int attempt = 1;; ++attempt) {
    auto req = make_request(model_id, render_question_prompt(trait, grade_range, rubric.body), 1024,
                            attempt);
    req.metadata = {{"kind", "generate"}, {"rubric_id", rubric.rubric_id}};
    b.raw_response = gw.cached_complete(req, refresh).first;
    try {
      texts = parse_question_list(b.raw_response);
      break;
    } catch (const ParseError& e) {
      // Duplicate numbering is a hard error; only an empty parse is retried.
      if (attempt >= 2 || std::string_view(e.what()) != "unparseable question list")
        throw ParseError("rubric " + rubric.rubric_id + ": " + e.what(), b.raw_response);
    }
  }
  for (std::size_t i = 0; i < texts.size(); ++i) {
    AssessmentQuestion q;
    q.trait = trait;
    q.rubric_id = rubric.rubric_id;
    q.ordinal = static_cast<int>(i + 1);
    q.question_id = rubric.rubric_id + "#" + std::to_string(q.ordinal);
    q.text = texts[i];
    b.questions.push_back(std::move(q));
  }
  return b;
}

Rating answer_question(gateway::Gateway& gw, const std::string& model_id,
                       const corpus::EssayRecord& essay, const corpus::PromptSpec& prompt,
                       const AssessmentQuestion& question, const std::string& trait) {
  if (essay.text.empty() || question.text.empty())
    throw ValidationError("answer_question needs a non-empty essay and question");
  std::string raw;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    auto req = make_request(
        model_id,
        render_answer_prompt(essay_type_text(prompt.essay_type), std::to_string(prompt.grade_level),
                             trait, prompt.task_description, essay.text, question.text),
        256, attempt);
    req.metadata = {{"kind", "answer"}, {"essay_id", essay.essay_id},
                    {"question_id", question.question_id}};
    raw = gw.cached_complete(req).first;
    try {
      return parse_rating(raw);
    } catch (const ParseError&) {
    }
  }
  throw ParseError("essay " + essay.essay_id + ", question " + question.question_id +
                       ": unparseable rating",
                   raw);
}

std::vector<AssessmentQuestion> ordered_questions(std::span<const QuestionBatch> batches) {
  std::vector<AssessmentQuestion> out;
  for (const auto& b : batches) out.insert(out.end(), b.questions.begin(), b.questions.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.rubric_id, a.ordinal) < std::tie(b.rubric_id, b.ordinal);
  });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].question_id == out[i - 1].question_id)
      throw ValidationError("question " + out[i].question_id + " appears in two batches");
  return out;
}

std::size_t TraitBlock::imputed_total() const {
  return std::accumulate(imputed.begin(), imputed.end(), std::size_t{0});
}

TraitBlock extract_trait_matrix(gateway::Gateway& gw, const std::string& model_id,
                                const corpus::Dataset& data, std::span<const std::size_t> essays,
                                std::span<const AssessmentQuestion> questions,
                                const std::string& trait, const TraitExtractionOptions& opt) {
  const std::size_t rows = essays.size();
  const std::size_t cols = questions.size();
  std::vector<ColumnInfo> info;
  for (const auto& q : questions) info.push_back({q.column(), FeatureCategory::kTraitSpecific});

  std::vector<double> cells(rows * cols, 0.0);
  std::vector<std::exception_ptr> errors(rows * cols);
  const auto n = static_cast<long long>(rows * cols);
  const int threads = std::max(1, opt.concurrency);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long k = 0; k < n; ++k) {
    const auto r = static_cast<std::size_t>(k) / cols;
    const auto c = static_cast<std::size_t>(k) % cols;
    try {
      const auto& essay = data.essays().at(essays[r]);
      cells[k] = numeric(answer_question(gw, model_id, essay, data.prompt(essay.prompt_id),
                                         questions[c], trait));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }

  TraitBlock out;
  out.imputed.assign(cols, 0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const ParseError&) {
      if (!opt.impute) throw;
      cells[k] = opt.impute_value;
      ++out.imputed[k % cols];
    }
  }
  out.matrix = FeatureMatrix(std::move(info));
  for (std::size_t r = 0; r < rows; ++r)
    out.matrix.add_row(data.essays()[essays[r]].essay_id,
                       std::span<const double>(cells.data() + r * cols, cols));
  return out;
}

double llm_direct_score(gateway::Gateway& gw, const std::string& model_id,
                        const corpus::EssayRecord& essay, const corpus::PromptSpec& prompt,
                        const corpus::RubricDoc& rubric, const std::string& trait) {
  const auto* range = prompt.range_for(trait);
  if (!range) throw ValidationError("prompt " + prompt.prompt_id + " has no range for " + trait);
  std::string raw;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    auto req = make_request(model_id,
                            render_direct_prompt(essay_type_text(prompt.essay_type), trait,
                                                 prompt.task_description, rubric.body, essay.text),
                            256, attempt);
    req.metadata = {{"kind", "direct"},
                    {"essay_id", essay.essay_id},
                    {"score_min", format_number(range->min)},
                    {"score_max", format_number(range->max)},
                    {"score_step", format_number(range->step)}};
    raw = gw.cached_complete(req).first;
    try {
      return parse_direct_score(raw, *range);
    } catch (const ParseError&) {
    }
  }
  throw ParseError("essay " + essay.essay_id + ": no score in response", raw);
}

}  // namespace trates::traits
