#include "trates/corpus/metadata.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trates/common/error.hpp"
#include "trates/corpus/text_normalize.hpp"

namespace trates::corpus {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

std::string id_string(const json& v) {
  // Prompt ids are opaque strings but ASAP numbers them, so accept both.
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ValidationError("prompt ids must be strings or integers");
}

ScoreRange parse_range(const json& j, const std::string& where) {
  ScoreRange r;
  r.min = require<double>(j, "min", where);
  r.max = require<double>(j, "max", where);
  r.step = j.value("step", 1.0);
  return r;
}

}  // namespace

Metadata parse_metadata(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("metadata is not valid JSON: ") + e.what());
  }
  if (j.value("schema", "") != "trates-metadata")
    throw ValidationError("metadata: 'schema' must be \"trates-metadata\"");
  if (j.value("version", 0) != kMetadataSchemaVersion)
    throw ValidationError("metadata: unsupported version (expected " +
                          std::to_string(kMetadataSchemaVersion) + ")");

  Metadata m;
  m.dataset_name = j.value("dataset", "");
  if (!j.contains("prompts") || !j["prompts"].is_array())
    throw ValidationError("metadata: 'prompts' must be an array");
  for (const auto& pj : j["prompts"]) {
    PromptSpec p;
    if (!pj.contains("prompt_id")) throw ValidationError("metadata: prompt without prompt_id");
    p.prompt_id = id_string(pj["prompt_id"]);
    const std::string where = "metadata prompt '" + p.prompt_id + "'";
    p.task_description = normalize_text(require<std::string>(pj, "task_description", where));
    const auto type = require<std::string>(pj, "essay_type", where);
    auto et = parse_essay_type(type);
    if (!et) throw ValidationError(where + ": unknown essay_type '" + type + "'");
    p.essay_type = *et;
    p.expected_length = require<double>(pj, "expected_length", where);
    p.source_length = pj.value("source_length", 0.0);
    p.grade_level = require<int>(pj, "grade_level", where);
    if (!pj.contains("score_ranges") || !pj["score_ranges"].is_object())
      throw ValidationError(where + ": 'score_ranges' must be an object");
    for (const auto& [trait, rj] : pj["score_ranges"].items())
      p.score_ranges[trait] = parse_range(rj, where + " trait '" + trait + "'");
    if (pj.contains("expected_essay_count"))
      p.expected_essay_count = pj["expected_essay_count"].get<std::size_t>();
    m.prompts.push_back(std::move(p));
  }

  if (!j.contains("rubrics") || !j["rubrics"].is_array())
    throw ValidationError("metadata: 'rubrics' must be an array");
  for (const auto& rj : j["rubrics"]) {
    RubricDoc r;
    r.rubric_id = require<std::string>(rj, "rubric_id", "metadata rubric");
    const std::string where = "metadata rubric '" + r.rubric_id + "'";
    r.trait = require<std::string>(rj, "trait", where);
    if (rj.contains("body")) {
      r.body = rj["body"].get<std::string>();
    } else if (rj.contains("body_file")) {
      r.body = read_file(base_dir / rj["body_file"].get<std::string>());
    } else {
      throw ValidationError(where + ": needs 'body' or 'body_file'");
    }
    r.body = normalize_text(r.body);
    if (!rj.contains("prompt_ids") || !rj["prompt_ids"].is_array())
      throw ValidationError(where + ": 'prompt_ids' must be an array");
    for (const auto& id : rj["prompt_ids"]) r.prompt_ids.push_back(id_string(id));
    m.rubrics.push_back(std::move(r));
  }

  if (j.contains("trait_columns"))
    m.trait_columns = j["trait_columns"].get<std::map<std::string, std::string>>();
  if (j.contains("columns")) {
    const auto& c = j["columns"];
    if (c.contains("essay_id")) m.essay_id_column = c["essay_id"].get<std::string>();
    if (c.contains("prompt_id")) m.prompt_id_column = c["prompt_id"].get<std::string>();
    if (c.contains("text")) m.text_column = c["text"].get<std::string>();
  }
  if (j.contains("expected_prompt_count"))
    m.expected_prompt_count = j["expected_prompt_count"].get<std::size_t>();
  if (j.contains("expected_essay_count"))
    m.expected_essay_count = j["expected_essay_count"].get<std::size_t>();
  return m;
}

Metadata load_metadata(const std::filesystem::path& path) {
  return parse_metadata(read_file(path), path.parent_path());
}

}  // namespace trates::corpus
