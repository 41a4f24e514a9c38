#include "trates/common/feature_matrix.hpp"

#include <algorithm>

#include "trates/common/error.hpp"

namespace trates {

std::string_view to_string(FeatureCategory c) {
  switch (c) {
    case FeatureCategory::kTraitSpecific: return "trait-specific";
    case FeatureCategory::kPromptSpecific: return "prompt-specific";
    case FeatureCategory::kLength: return "length";
    case FeatureCategory::kReadability: return "readability";
    case FeatureCategory::kComplexity: return "complexity";
    case FeatureCategory::kVariation: return "variations";
    case FeatureCategory::kSentiment: return "sentiment";
  }
  return "unknown";
}

std::optional<FeatureCategory> parse_feature_category(std::string_view name) {
  for (FeatureCategory c : kAllCategories)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

FeatureMatrix::FeatureMatrix(std::vector<ColumnInfo> columns) : columns_(std::move(columns)) {}

void FeatureMatrix::add_row(std::string row_id, std::span<const double> values) {
  if (values.size() != cols())
    throw DimensionError("FeatureMatrix::add_row: expected " + std::to_string(cols()) +
                         " values, got " + std::to_string(values.size()));
  row_ids_.push_back(std::move(row_id));
  values_.insert(values_.end(), values.begin(), values.end());
}

std::optional<std::size_t> FeatureMatrix::find_column(std::string_view name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c)
    if (columns_[c].name == name) return c;
  return std::nullopt;
}

std::optional<std::size_t> FeatureMatrix::find_row(std::string_view row_id) const {
  auto it = std::find(row_ids_.begin(), row_ids_.end(), row_id);
  if (it == row_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - row_ids_.begin());
}

std::vector<std::string> FeatureMatrix::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

FeatureMatrix FeatureMatrix::hconcat(const std::vector<const FeatureMatrix*>& blocks) {
  std::vector<ColumnInfo> cols;
  for (const auto* b : blocks) cols.insert(cols.end(), b->columns_.begin(), b->columns_.end());
  FeatureMatrix out(std::move(cols));
  if (blocks.empty()) return out;
  const std::size_t n = blocks.front()->rows();
  for (const auto* b : blocks) {
    if (b->rows() != n) throw DimensionError("hconcat: row count mismatch");
  }
  out.row_ids_ = blocks.front()->row_ids_;
  out.values_.reserve(n * out.cols());
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto* b : blocks) {
      if (b->row_ids_[r] != out.row_ids_[r])
        throw DimensionError("hconcat: row id mismatch at row " + std::to_string(r));
      auto row = b->row(r);
      out.values_.insert(out.values_.end(), row.begin(), row.end());
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out(columns_);
  out.values_.reserve(rows.size() * cols());
  for (std::size_t r : rows) out.add_row(row_ids_.at(r), row(r));
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> keep) const {
  std::vector<ColumnInfo> cols;
  cols.reserve(keep.size());
  for (std::size_t c : keep) cols.push_back(columns_.at(c));
  FeatureMatrix out(std::move(cols));
  out.row_ids_ = row_ids_;
  out.values_.reserve(rows() * keep.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c : keep) out.values_.push_back(at(r, c));
  return out;
}

}  // namespace trates
