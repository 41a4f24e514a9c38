#include "trates/corpus/loaders.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "trates/common/error.hpp"
#include "trates/corpus/metadata.hpp"
#include "trates/corpus/text_normalize.hpp"

namespace trates::corpus {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  if (s.starts_with("\xEF\xBB\xBF")) s.erase(0, 3);
  return s;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_missing(const std::string& cell) {
  const std::string t = trim(cell);
  return t.empty() || t == "NA" || t == "nan" || t == "NaN" || t == "null";
}

struct ColumnMap {
  std::size_t essay_id;
  std::size_t prompt_id;
  std::size_t text;
  std::vector<std::pair<std::size_t, std::string>> traits;  // column index -> trait
};

ColumnMap map_columns(const std::vector<std::string>& header, const Metadata& meta,
                      const std::string& default_id, const std::string& default_prompt,
                      const std::string& default_text, const std::string& file) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[trim(header[i])] = i;
  auto find = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end())
      throw ValidationError(file + ": missing header column '" + name + "'");
    return it->second;
  };
  ColumnMap cm{};
  cm.essay_id = find(meta.essay_id_column.value_or(default_id));
  cm.prompt_id = find(meta.prompt_id_column.value_or(default_prompt));
  cm.text = find(meta.text_column.value_or(default_text));

  std::set<std::string> traits;
  for (const auto& p : meta.prompts)
    for (const auto& [t, _] : p.score_ranges) traits.insert(t);
  std::map<std::string, std::string> trait_to_column;
  for (const auto& t : traits) trait_to_column[t] = t;
  for (const auto& [column, trait] : meta.trait_columns) trait_to_column[trait] = column;
  for (const auto& t : traits) cm.traits.emplace_back(find(trait_to_column[t]), t);
  return cm;
}

double parse_score(const std::string& cell, std::size_t row, const std::string& trait,
                   const std::string& file) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || !std::isfinite(v))
    throw ValidationError(file + " row " + std::to_string(row) + ": trait '" + trait +
                          "' score '" + t + "' is not a number");
  return v;
}

Dataset build_dataset(const std::vector<std::vector<std::string>>& records, const Metadata& meta,
                      const std::string& default_id, const std::string& default_prompt,
                      const std::string& default_text, const std::string& file,
                      bool require_half_grid) {
  if (records.empty()) throw ValidationError(file + ": no header row");
  const ColumnMap cm =
      map_columns(records.front(), meta, default_id, default_prompt, default_text, file);

  std::map<std::string, const PromptSpec*> prompts;
  for (const auto& p : meta.prompts) prompts[p.prompt_id] = &p;

  std::vector<EssayRecord> essays;
  essays.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t row = r + 1;  // 1-based line of the record, header is row 1
    if (rec.size() == 1 && trim(rec[0]).empty()) continue;
    if (rec.size() < records.front().size())
      throw ValidationError(file + " row " + std::to_string(row) + ": expected " +
                            std::to_string(records.front().size()) + " fields, got " +
                            std::to_string(rec.size()));
    EssayRecord e;
    e.essay_id = trim(rec[cm.essay_id]);
    e.prompt_id = trim(rec[cm.prompt_id]);
    auto pit = prompts.find(e.prompt_id);
    if (pit == prompts.end())
      throw ValidationError(file + " row " + std::to_string(row) + ": unknown prompt_id '" +
                            e.prompt_id + "'");
    try {
      e.text = normalize_text(rec[cm.text]);
    } catch (const ValidationError& err) {
      throw ValidationError(file + " row " + std::to_string(row) + ": " + err.what());
    }
    if (!has_content(e.text))
      throw ValidationError(file + " row " + std::to_string(row) + ": empty essay text");
    for (const auto& [col, trait] : cm.traits) {
      if (is_missing(rec[col])) continue;
      const ScoreRange* range = pit->second->range_for(trait);
      const double v = parse_score(rec[col], row, trait, file);
      if (!range)
        throw ValidationError(file + " row " + std::to_string(row) + ": trait '" + trait +
                              "' is not declared for prompt '" + e.prompt_id + "'");
      if (require_half_grid && std::abs(v * 2 - std::round(v * 2)) > 1e-9)
        throw ValidationError(file + " row " + std::to_string(row) + ": trait '" + trait +
                              "' score " + trim(rec[col]) + " is not on the 0.5 grid");
      if (!range->contains(v))
        throw ValidationError(file + " row " + std::to_string(row) + ": trait '" + trait +
                              "' score " + trim(rec[col]) + " is outside the declared range [" +
                              std::to_string(range->min) + ", " + std::to_string(range->max) +
                              "]");
      e.trait_scores[trait] = v;
    }
    essays.push_back(std::move(e));
  }
  if (meta.expected_essay_count && essays.size() != *meta.expected_essay_count)
    throw ValidationError(file + ": manifest expects " + std::to_string(*meta.expected_essay_count) +
                          " essays, found " + std::to_string(essays.size()));
  if (meta.expected_prompt_count && meta.prompts.size() != *meta.expected_prompt_count)
    throw ValidationError(file + ": manifest expects " +
                          std::to_string(*meta.expected_prompt_count) + " prompts, metadata has " +
                          std::to_string(meta.prompts.size()));
  return Dataset(meta.dataset_name, meta.prompts, meta.rubrics, std::move(essays));
}

}  // namespace

std::vector<std::vector<std::string>> parse_tsv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields;
    std::size_t b = 0;
    while (true) {
      std::size_t t = line.find('\t', b);
      if (t == std::string_view::npos) {
        fields.emplace_back(line.substr(b));
        break;
      }
      fields.emplace_back(line.substr(b, t - b));
      b = t + 1;
    }
    out.push_back(std::move(fields));
    start = end + 1;
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, char delimiter) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == delimiter) {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      out.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ValidationError("CSV: unterminated quoted field");
  if (any) {
    record.push_back(std::move(field));
    out.push_back(std::move(record));
  }
  return out;
}

Dataset load_asap(const std::filesystem::path& data_path,
                  const std::filesystem::path& metadata_path) {
  const Metadata meta = load_metadata(metadata_path);
  const auto records = parse_tsv(read_file(data_path));
  return build_dataset(records, meta, "essay_id", "essay_set", "essay", data_path.string(),
                       /*require_half_grid=*/false);
}

Dataset load_ellipse(const std::filesystem::path& data_path,
                     const std::filesystem::path& metadata_path) {
  const Metadata meta = load_metadata(metadata_path);
  for (const auto& p : meta.prompts)
    for (const auto& [trait, range] : p.score_ranges)
      if (std::abs(range.step - 0.5) > 1e-12)
        throw ValidationError("ELLIPSE metadata: trait '" + trait + "' on prompt '" + p.prompt_id +
                              "' must use step 0.5");
  std::map<std::string, std::size_t> rubrics_per_trait;
  for (const auto& r : meta.rubrics) ++rubrics_per_trait[r.trait];
  for (const auto& [trait, n] : rubrics_per_trait)
    if (n != 1)
      throw ValidationError("ELLIPSE metadata: trait '" + trait +
                            "' must have exactly one shared rubric");
  const auto records = parse_csv(read_file(data_path));
  return build_dataset(records, meta, "text_id", "prompt", "full_text", data_path.string(),
                       /*require_half_grid=*/true);
}

}  // namespace trates::corpus
