#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "trates/common/feature_matrix.hpp"
#include "trates/corpus/types.hpp"

namespace trates::scaling {

/// Maps one prompt/trait score grid onto [0, target_max].
struct ScaleSpec {
  corpus::ScoreRange raw;
  int grade_level = 0;
  double target_max = 6.0;

  /// Grid of `trait` on `prompt_id`. With grade scaling on, target_max drops by
  /// one for every distinct dataset grade above the prompt's grade (floor 1);
  /// otherwise it is 6 for every prompt.
  static ScaleSpec for_prompt(const corpus::Dataset& data, const std::string& prompt_id,
                              const std::string& trait, bool grade_scaling = true);
};

/// 6 minus the number of distinct entries of `grades` above `grade`, at least 1.
double grade_target_max(int grade, std::span<const int> grades);

/// Linear map raw_min -> 0, raw_max -> target_max. Throws ValidationError
/// when `raw` is off the declared grid.
double scale_score(double raw, const ScaleSpec& spec);

/// Inverse map, rounded to the nearest grid point (ties away from zero) and
/// clamped to the raw range.
double unscale_score(double value, const ScaleSpec& spec);

/// Per-column min-max scaler fitted on training rows.
class Normalizer {
 public:
  Normalizer() = default;

  static Normalizer fit(const FeatureMatrix& train);

  /// (x - min) / (max - min) clamped to [0, 1]; constant columns give 0.
  /// Columns must match the fit by name and order.
  FeatureMatrix apply(const FeatureMatrix& m) const;
  void apply_row(std::span<const double> in, std::span<double> out) const;

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<double>& mins() const noexcept { return mins_; }
  const std::vector<double>& maxs() const noexcept { return maxs_; }
  bool is_constant(std::size_t c) const { return !(maxs_[c] > mins_[c]); }

  nlohmann::ordered_json to_json() const;
  static Normalizer from_json(const nlohmann::json& j);

  friend bool operator==(const Normalizer&, const Normalizer&) = default;

 private:
  std::vector<std::string> columns_;
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

}  // namespace trates::scaling
