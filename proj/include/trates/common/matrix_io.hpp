#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "trates/common/feature_matrix.hpp"

namespace trates {

/// Key/value header lines carried by a matrix file.
using MatrixMeta = std::map<std::string, std::string>;

/// Tab-separated matrix: "# key<TAB>value" header lines, a "# categories" line,
/// then a column header starting with "essay_id" and one row per essay.
/// Values are written with 17 significant digits so reads are exact.
std::string format_matrix_tsv(const FeatureMatrix& m, const MatrixMeta& meta = {});
FeatureMatrix parse_matrix_tsv(const std::string& text, MatrixMeta* meta = nullptr);

void write_matrix_tsv(const std::filesystem::path& path, const FeatureMatrix& m,
                      const MatrixMeta& meta = {});
FeatureMatrix read_matrix_tsv(const std::filesystem::path& path, MatrixMeta* meta = nullptr);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace trates
