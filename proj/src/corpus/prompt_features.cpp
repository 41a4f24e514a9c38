#include "trates/corpus/prompt_features.hpp"

namespace trates::corpus {

std::array<double, 4> prompt_feature_vector(const PromptSpec& prompt) {
  return {static_cast<double>(static_cast<int>(prompt.essay_type)), prompt.expected_length,
          prompt.source_length, static_cast<double>(prompt.grade_level)};
}

FeatureMatrix prompt_feature_block(const Dataset& data, const std::vector<std::size_t>& essays) {
  std::vector<ColumnInfo> cols;
  for (auto name : kPromptFeatureNames)
    cols.push_back({std::string(name), FeatureCategory::kPromptSpecific});
  FeatureMatrix m(std::move(cols));
  for (std::size_t i : essays) {
    const auto& e = data.essays().at(i);
    const auto v = prompt_feature_vector(data.prompt(e.prompt_id));
    m.add_row(e.essay_id, v);
  }
  return m;
}

}  // namespace trates::corpus
