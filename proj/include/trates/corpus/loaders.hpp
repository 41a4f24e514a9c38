#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trates/corpus/types.hpp"

namespace trates::corpus {

/// ASAP / ASAP++ essays: UTF-8 TSV with a header row. Default columns are
/// essay_id, essay_set and essay; trait columns come from the metadata.
Dataset load_asap(const std::filesystem::path& data_path,
                  const std::filesystem::path& metadata_path);

/// ELLIPSE essays: UTF-8 RFC-4180 CSV with a header row. Default columns are
/// text_id, prompt and full_text. Scores must sit on the 0.5 grid of [1, 5]
/// and every trait shares one rubric across all prompts.
Dataset load_ellipse(const std::filesystem::path& data_path,
                     const std::filesystem::path& metadata_path);

/// RFC-4180 records (quoted fields, doubled quotes, embedded newlines).
std::vector<std::vector<std::string>> parse_csv(const std::string& text, char delimiter = ',');

/// Plain TSV: no quoting, one record per line, trailing CR stripped.
std::vector<std::vector<std::string>> parse_tsv(const std::string& text);

}  // namespace trates::corpus
