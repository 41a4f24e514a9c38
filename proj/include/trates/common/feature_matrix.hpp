#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trates {

/// Provenance of a feature column. Order matches the ablation report.
enum class FeatureCategory {
  kTraitSpecific,
  kPromptSpecific,
  kLength,
  kReadability,
  kComplexity,
  kVariation,
  kSentiment,
};

std::string_view to_string(FeatureCategory c);
std::optional<FeatureCategory> parse_feature_category(std::string_view name);
inline constexpr FeatureCategory kAllCategories[] = {
    FeatureCategory::kTraitSpecific, FeatureCategory::kPromptSpecific,
    FeatureCategory::kLength,        FeatureCategory::kReadability,
    FeatureCategory::kComplexity,    FeatureCategory::kVariation,
    FeatureCategory::kSentiment,
};

struct ColumnInfo {
  std::string name;
  FeatureCategory category;
};

/// Dense row-major table of named feature columns, one row per essay.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::vector<ColumnInfo> columns);

  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t cols() const noexcept { return columns_.size(); }

  const std::vector<ColumnInfo>& columns() const noexcept { return columns_; }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }

  void add_row(std::string row_id, std::span<const double> values);

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols(), cols()}; }

  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

  std::optional<std::size_t> find_column(std::string_view name) const;
  std::optional<std::size_t> find_row(std::string_view row_id) const;

  /// Column names in order.
  std::vector<std::string> column_names() const;

  const std::vector<double>& data() const noexcept { return values_; }

  /// Horizontal concatenation; row ids must agree position by position.
  static FeatureMatrix hconcat(const std::vector<const FeatureMatrix*>& blocks);

  /// Keep only the listed row indices, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  /// Keep only the columns the predicate accepts.
  template <typename Pred>
  FeatureMatrix filter_columns(Pred keep) const {
    std::vector<std::size_t> idx;
    for (std::size_t c = 0; c < cols(); ++c)
      if (keep(columns_[c])) idx.push_back(c);
    return select_columns(idx);
  }
  FeatureMatrix select_columns(std::span<const std::size_t> cols) const;

 private:
  std::vector<ColumnInfo> columns_;
  std::vector<std::string> row_ids_;
  std::vector<double> values_;
};

}  // namespace trates
