#include "trates/corpus/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "trates/common/digest.hpp"
#include "trates/common/error.hpp"
#include "trates/corpus/text_normalize.hpp"

namespace trates::corpus {

namespace {
constexpr double kGridTolerance = 1e-9;
}

std::string_view to_string(EssayType t) {
  switch (t) {
    case EssayType::kPersuasive: return "persuasive";
    case EssayType::kNarrative: return "narrative";
    case EssayType::kSourceDependent: return "source_dependent";
    case EssayType::kOther: return "other";
  }
  return "other";
}

std::optional<EssayType> parse_essay_type(std::string_view s) {
  for (EssayType t : {EssayType::kPersuasive, EssayType::kNarrative, EssayType::kSourceDependent,
                      EssayType::kOther})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::size_t ScoreRange::grid_size() const {
  return static_cast<std::size_t>(std::llround((max - min) / step)) + 1;
}

std::optional<std::size_t> ScoreRange::grid_index(double value) const {
  if (!std::isfinite(value)) return std::nullopt;
  const double pos = (value - min) / step;
  const double rounded = std::round(pos);
  if (std::abs(pos - rounded) > kGridTolerance) return std::nullopt;
  if (rounded < 0 || rounded > static_cast<double>(grid_size() - 1)) return std::nullopt;
  return static_cast<std::size_t>(rounded);
}

const ScoreRange* PromptSpec::range_for(std::string_view trait) const {
  auto it = score_ranges.find(std::string(trait));
  return it == score_ranges.end() ? nullptr : &it->second;
}

std::optional<double> EssayRecord::score(std::string_view trait) const {
  auto it = trait_scores.find(std::string(trait));
  if (it == trait_scores.end()) return std::nullopt;
  return it->second;
}

Dataset::Dataset(std::string name, std::vector<PromptSpec> prompts, std::vector<RubricDoc> rubrics,
                 std::vector<EssayRecord> essays)
    : name_(std::move(name)),
      prompts_(std::move(prompts)),
      rubrics_(std::move(rubrics)),
      essays_(std::move(essays)) {
  build_index();
  validate();
}

void Dataset::build_index() {
  for (std::size_t i = 0; i < prompts_.size(); ++i) {
    if (!prompt_index_.emplace(prompts_[i].prompt_id, i).second)
      throw ValidationError("duplicate prompt_id '" + prompts_[i].prompt_id + "'");
  }
  for (std::size_t i = 0; i < rubrics_.size(); ++i) {
    const auto& r = rubrics_[i];
    if (!rubric_index_.emplace(r.rubric_id, i).second)
      throw ValidationError("duplicate rubric_id '" + r.rubric_id + "'");
    for (const auto& p : r.prompt_ids) {
      if (!trait_prompt_rubric_.emplace(std::make_pair(r.trait, p), i).second)
        throw ValidationError("trait '" + r.trait + "' on prompt '" + p +
                              "' is assigned more than one rubric");
    }
  }
  for (std::size_t i = 0; i < essays_.size(); ++i) {
    if (!essay_index_.emplace(essays_[i].essay_id, i).second)
      throw ValidationError("duplicate essay_id '" + essays_[i].essay_id + "'");
  }
}

void Dataset::validate() const {
  for (const auto& p : prompts_) {
    if (!(p.expected_length > 0))
      throw ValidationError("prompt '" + p.prompt_id + "': expected_length must be > 0");
    if (p.source_length < 0)
      throw ValidationError("prompt '" + p.prompt_id + "': source_length must be >= 0");
    if (p.grade_level < 1 || p.grade_level > 12)
      throw ValidationError("prompt '" + p.prompt_id + "': grade_level must be in [1, 12]");
    for (const auto& [trait, range] : p.score_ranges) {
      if (!(range.min < range.max) || !(range.step > 0))
        throw ValidationError("prompt '" + p.prompt_id + "' trait '" + trait +
                              "': score range needs min < max and step > 0");
      const double cells = (range.max - range.min) / range.step;
      if (std::abs(cells - std::round(cells)) > kGridTolerance)
        throw ValidationError("prompt '" + p.prompt_id + "' trait '" + trait +
                              "': max is not on the min + k*step grid");
      if (!trait_prompt_rubric_.contains({trait, p.prompt_id}))
        throw ValidationError("no rubric for trait '" + trait + "' on prompt '" + p.prompt_id +
                              "'");
    }
  }
  for (const auto& r : rubrics_) {
    if (!has_content(r.body)) throw ValidationError("rubric '" + r.rubric_id + "' has an empty body");
    for (const auto& p : r.prompt_ids)
      if (!prompt_index_.contains(p))
        throw ValidationError("rubric '" + r.rubric_id + "' names unknown prompt '" + p + "'");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& e : essays_) {
    const PromptSpec* p = find_prompt(e.prompt_id);
    if (!p)
      throw ValidationError("essay '" + e.essay_id + "' has unknown prompt_id '" + e.prompt_id + "'");
    if (!has_content(e.text)) throw ValidationError("essay '" + e.essay_id + "' has empty text");
    for (const auto& [trait, score] : e.trait_scores) {
      const ScoreRange* range = p->range_for(trait);
      if (!range)
        throw ValidationError("essay '" + e.essay_id + "' scores trait '" + trait +
                              "' which prompt '" + e.prompt_id + "' does not declare");
      if (!range->contains(score))
        throw ValidationError("essay '" + e.essay_id + "' trait '" + trait + "' score " +
                              std::to_string(score) + " is outside the declared grid");
    }
    ++counts[e.prompt_id];
  }
  for (const auto& p : prompts_) {
    if (p.expected_essay_count && counts[p.prompt_id] != *p.expected_essay_count)
      throw ValidationError("prompt '" + p.prompt_id + "': manifest expects " +
                            std::to_string(*p.expected_essay_count) + " essays, found " +
                            std::to_string(counts[p.prompt_id]));
  }
}

const PromptSpec* Dataset::find_prompt(std::string_view prompt_id) const {
  auto it = prompt_index_.find(prompt_id);
  return it == prompt_index_.end() ? nullptr : &prompts_[it->second];
}

const PromptSpec& Dataset::prompt(std::string_view prompt_id) const {
  if (const auto* p = find_prompt(prompt_id)) return *p;
  throw ValidationError("unknown prompt_id '" + std::string(prompt_id) + "'");
}

const RubricDoc& Dataset::rubric(std::string_view rubric_id) const {
  auto it = rubric_index_.find(rubric_id);
  if (it == rubric_index_.end())
    throw ValidationError("unknown rubric_id '" + std::string(rubric_id) + "'");
  return rubrics_[it->second];
}

const RubricDoc& Dataset::rubric_for(std::string_view trait, std::string_view prompt_id) const {
  auto it = trait_prompt_rubric_.find({std::string(trait), std::string(prompt_id)});
  if (it == trait_prompt_rubric_.end())
    throw ValidationError("no rubric for trait '" + std::string(trait) + "' on prompt '" +
                          std::string(prompt_id) + "'");
  return rubrics_[it->second];
}

const EssayRecord& Dataset::essay(std::string_view essay_id) const {
  auto it = essay_index_.find(essay_id);
  if (it == essay_index_.end())
    throw ValidationError("unknown essay_id '" + std::string(essay_id) + "'");
  return essays_[it->second];
}

std::vector<std::string> Dataset::prompt_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : prompt_index_) ids.push_back(id);
  return ids;
}

std::vector<std::string> Dataset::traits() const {
  std::set<std::string> out;
  for (const auto& p : prompts_)
    for (const auto& [t, _] : p.score_ranges) out.insert(t);
  return {out.begin(), out.end()};
}

std::vector<std::size_t> Dataset::essays_with_trait(std::string_view trait) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < essays_.size(); ++i)
    if (essays_[i].score(trait)) out.push_back(i);
  return out;
}

std::vector<std::string> Dataset::prompts_with_trait(std::string_view trait) const {
  std::vector<std::string> out;
  for (const auto& id : prompt_ids())
    if (prompt(id).range_for(trait)) out.push_back(id);
  return out;
}

std::vector<int> Dataset::grade_levels() const {
  std::set<int> g;
  for (const auto& p : prompts_) g.insert(p.grade_level);
  return {g.begin(), g.end()};
}

std::string Dataset::serialize() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["name"] = name_;
  ordered_json prompts = ordered_json::array();
  for (const auto& p : prompts_) {
    ordered_json pj;
    pj["prompt_id"] = p.prompt_id;
    pj["task_description"] = p.task_description;
    pj["essay_type"] = to_string(p.essay_type);
    pj["expected_length"] = p.expected_length;
    pj["source_length"] = p.source_length;
    pj["grade_level"] = p.grade_level;
    ordered_json ranges = ordered_json::object();
    for (const auto& [t, r] : p.score_ranges) ranges[t] = {r.min, r.max, r.step};
    pj["score_ranges"] = ranges;
    prompts.push_back(pj);
  }
  j["prompts"] = prompts;
  ordered_json rubrics = ordered_json::array();
  for (const auto& r : rubrics_)
    rubrics.push_back({{"rubric_id", r.rubric_id},
                       {"trait", r.trait},
                       {"prompt_ids", r.prompt_ids},
                       {"body", r.body}});
  j["rubrics"] = rubrics;
  ordered_json essays = ordered_json::array();
  for (const auto& e : essays_) {
    ordered_json scores = ordered_json::object();
    for (const auto& [t, s] : e.trait_scores) scores[t] = s;
    essays.push_back(
        {{"essay_id", e.essay_id}, {"prompt_id", e.prompt_id}, {"text", e.text}, {"scores", scores}});
  }
  j["essays"] = essays;
  return j.dump();
}

std::string Dataset::digest() const { return sha256_hex(serialize()); }

}  // namespace trates::corpus
