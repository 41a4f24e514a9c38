#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "trates/common/feature_matrix.hpp"
#include "trates/corpus/types.hpp"

namespace trates::corpus {

inline constexpr std::array<std::string_view, 4> kPromptFeatureNames = {
    "essay_type", "expected_length", "source_length", "grade_level"};

/// Prompt-specific features O. essay_type is a single categorical code (enum
/// order) so the block holds exactly four columns.
std::array<double, 4> prompt_feature_vector(const PromptSpec& prompt);

/// One row per listed essay, columns per kPromptFeatureNames.
FeatureMatrix prompt_feature_block(const Dataset& data, const std::vector<std::size_t>& essays);

}  // namespace trates::corpus
