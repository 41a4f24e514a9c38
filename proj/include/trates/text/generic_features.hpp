#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trates/common/feature_matrix.hpp"
#include "trates/text/lexicons.hpp"
#include "trates/text/pos_tagger.hpp"

namespace trates::text {

struct RegistryEntry {
  std::string_view name;
  FeatureCategory category;
  std::string_view description;
};

/// The generic writing-quality feature set, in extraction order.
const std::vector<RegistryEntry>& feature_registry();
std::vector<ColumnInfo> registry_columns();
/// Tab-separated export: name, category, description.
std::string registry_table();

class GenericFeatureExtractor {
 public:
  GenericFeatureExtractor(const Lexicons& lex, const PerceptronTagger& tagger)
      : lex_(lex), tagger_(tagger) {}
  /// Uses the shared bundled assets.
  GenericFeatureExtractor();

  /// One value per registry entry.
  std::vector<double> extract(std::string_view text) const;

 private:
  const Lexicons& lex_;
  const PerceptronTagger& tagger_;
};

/// Serial reference: one row per text, in order.
FeatureMatrix extract_generic_serial(const GenericFeatureExtractor& fx,
                                     std::span<const std::string> ids,
                                     std::span<const std::string> texts);

/// OpenMP version over essays; bit-identical to the serial path.
FeatureMatrix extract_generic_parallel(const GenericFeatureExtractor& fx,
                                       std::span<const std::string> ids,
                                       std::span<const std::string> texts);

}  // namespace trates::text
