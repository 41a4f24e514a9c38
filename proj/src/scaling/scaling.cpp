#include "trates/scaling/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "trates/common/error.hpp"

namespace trates::scaling {

double grade_target_max(int grade, std::span<const int> grades) {
  const std::set<int> distinct(grades.begin(), grades.end());
  const auto above = std::distance(distinct.upper_bound(grade), distinct.end());
  return std::max(1.0, 6.0 - static_cast<double>(above));
}

ScaleSpec ScaleSpec::for_prompt(const corpus::Dataset& data, const std::string& prompt_id,
                                const std::string& trait, bool grade_scaling) {
  const corpus::PromptSpec& p = data.prompt(prompt_id);
  const corpus::ScoreRange* r = p.range_for(trait);
  if (!r) throw ValidationError("prompt " + prompt_id + " does not score trait '" + trait + "'");
  ScaleSpec s;
  s.raw = *r;
  s.grade_level = p.grade_level;
  if (grade_scaling) {
    const auto grades = data.grade_levels();
    s.target_max = grade_target_max(p.grade_level, grades);
  }
  return s;
}

double scale_score(double raw, const ScaleSpec& spec) {
  if (!spec.raw.contains(raw))
    throw ValidationError("score " + std::to_string(raw) + " is not on the grid [" +
                          std::to_string(spec.raw.min) + ", " + std::to_string(spec.raw.max) +
                          "] step " + std::to_string(spec.raw.step));
  return (raw - spec.raw.min) / (spec.raw.max - spec.raw.min) * spec.target_max;
}

double unscale_score(double value, const ScaleSpec& spec) {
  const double raw = spec.raw.min + value / spec.target_max * (spec.raw.max - spec.raw.min);
  // Nearest grid index; std::round already rounds halves away from zero.
  const double idx = std::round((raw - spec.raw.min) / spec.raw.step);
  const double last = static_cast<double>(spec.raw.grid_size() - 1);
  const double clamped = std::clamp(idx, 0.0, last);
  return spec.raw.grid_value(static_cast<std::size_t>(clamped));
}

Normalizer Normalizer::fit(const FeatureMatrix& train) {
  if (train.rows() == 0) throw ValidationError("cannot fit a normalizer on zero rows");
  Normalizer n;
  n.columns_ = train.column_names();
  n.mins_.assign(train.cols(), 0.0);
  n.maxs_.assign(train.cols(), 0.0);
  for (std::size_t c = 0; c < train.cols(); ++c) {
    double lo = train.at(0, c), hi = lo;
    for (std::size_t r = 1; r < train.rows(); ++r) {
      lo = std::min(lo, train.at(r, c));
      hi = std::max(hi, train.at(r, c));
    }
    n.mins_[c] = lo;
    n.maxs_[c] = hi;
  }
  return n;
}

void Normalizer::apply_row(std::span<const double> in, std::span<double> out) const {
  if (in.size() != columns_.size() || out.size() != columns_.size())
    throw DimensionError("normalizer expects " + std::to_string(columns_.size()) + " columns");
  for (std::size_t c = 0; c < in.size(); ++c) {
    if (is_constant(c)) {
      out[c] = 0.0;
      continue;
    }
    out[c] = std::clamp((in[c] - mins_[c]) / (maxs_[c] - mins_[c]), 0.0, 1.0);
  }
}

FeatureMatrix Normalizer::apply(const FeatureMatrix& m) const {
  if (m.column_names() != columns_)
    throw DimensionError("normalizer columns do not match the matrix");
  FeatureMatrix out(m.columns());
  std::vector<double> buf(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    apply_row(m.row(r), buf);
    out.add_row(m.row_ids()[r], buf);
  }
  return out;
}

nlohmann::ordered_json Normalizer::to_json() const {
  nlohmann::ordered_json j;
  j["columns"] = columns_;
  j["min"] = mins_;
  j["max"] = maxs_;
  return j;
}

Normalizer Normalizer::from_json(const nlohmann::json& j) {
  Normalizer n;
  n.columns_ = j.at("columns").get<std::vector<std::string>>();
  n.mins_ = j.at("min").get<std::vector<double>>();
  n.maxs_ = j.at("max").get<std::vector<double>>();
  if (n.mins_.size() != n.columns_.size() || n.maxs_.size() != n.columns_.size())
    throw ParseError("normalizer: column/min/max lengths differ");
  return n;
}

}  // namespace trates::scaling
