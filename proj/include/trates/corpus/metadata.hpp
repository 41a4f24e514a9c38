#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trates/corpus/types.hpp"

namespace trates::corpus {

/// Parsed metadata sidecar (schema "trates-metadata", version 1; see
/// docs/metadata_schema.md).
struct Metadata {
  std::string dataset_name;
  std::vector<PromptSpec> prompts;
  std::vector<RubricDoc> rubrics;
  /// Input column name -> trait name. Traits not listed map to a column of the
  /// same name.
  std::map<std::string, std::string> trait_columns;
  std::optional<std::string> essay_id_column;
  std::optional<std::string> prompt_id_column;
  std::optional<std::string> text_column;
  std::optional<std::size_t> expected_prompt_count;
  std::optional<std::size_t> expected_essay_count;
};

inline constexpr int kMetadataSchemaVersion = 1;

Metadata load_metadata(const std::filesystem::path& path);
Metadata parse_metadata(const std::string& json_text, const std::filesystem::path& base_dir);

}  // namespace trates::corpus
