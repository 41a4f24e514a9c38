#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trates/common/feature_matrix.hpp"
#include "trates/corpus/types.hpp"
#include "trates/gateway/gateway.hpp"
#include "trates/model/regressor.hpp"
#include "trates/tuning/tuner.hpp"

namespace trates::eval {

/// Quadratic weighted kappa on a score grid. Both constant and equal: 1.0;
/// any other zero-expected-disagreement case: -1.0.
double qwk(std::span<const double> pred, std::span<const double> gold,
           const corpus::ScoreRange& grid);
double qwk(std::span<const double> pred, std::span<const double> gold, double s_min, double s_max,
           double step);

struct FoldPlan {
  std::string fold_id;
  std::vector<std::string> source;
  std::vector<std::string> target;
};

/// One fold per prompt, holding that prompt out.
std::vector<FoldPlan> leave_one_prompt_out(std::vector<std::string> prompt_ids);
/// Prompts sorted by id, shuffled with `seed`, then cut into `groups` folds of
/// near-equal size (11 x 4 for ELLIPSE).
std::vector<FoldPlan> grouped_folds(std::vector<std::string> prompt_ids, std::size_t groups,
                                    std::uint64_t seed);
/// Disjoint source/target per fold; each prompt is a target exactly once.
void validate_plan(std::span<const FoldPlan> plan, std::span<const std::string> prompt_ids);

enum class FeatureSet { kTrates, kLlmF, kGpF };
std::string_view to_string(FeatureSet f);
std::optional<FeatureSet> parse_feature_set(std::string_view s);
bool feature_set_includes(FeatureSet f, FeatureCategory c);

struct RunConfig {
  FeatureSet feature_set = FeatureSet::kTrates;
  std::vector<std::string> traits;
  std::string model_id;
  bool tune = true;
  model::Hyperparameters fixed;   // used when tune is false
  tuning::SearchSpace space = tuning::SearchSpace::standard();
  std::uint64_t seed = 42;
  bool grade_scaling = true;
  std::set<FeatureCategory> excluded;  // ablation
  bool parallel = true;

  nlohmann::ordered_json to_json() const;
};

/// Counts feature-row reads by phase and by whether the row belongs to a
/// target prompt.
struct AccessLog {
  std::map<std::string, std::size_t> source_reads;
  std::map<std::string, std::size_t> target_reads;

  std::size_t target_reads_before_prediction() const;
};

/// Serialized training-side state of one fold, for byte comparisons.
struct FoldArtifacts {
  std::string columns;
  std::string normalizer;
  std::string tuning;
  std::string network;
  std::string history;
};

struct FoldResult {
  std::string fold_id;
  std::string trait;
  std::vector<std::string> target_prompts;
  std::size_t n_train = 0, n_val = 0, n_target = 0, n_features = 0;
  double qwk = 0;
  model::Hyperparameters hp;
  int epochs_run = 0;
  std::vector<std::string> essay_ids;  // target essays, prediction order
  std::vector<double> predictions;     // raw grid
  std::vector<double> gold;
  FoldArtifacts artifacts;
  AccessLog access;
};

/// Full feature table of one trait: one row per essay that carries the
/// trait, columns of every category. Trait-specific columns are named
/// "q:<rubric_id>#<ordinal>".
struct TraitTable {
  std::string trait;
  FeatureMatrix matrix;
};

/// Rubric id of a trait-specific column name, or empty.
std::string rubric_of_column(std::string_view column);

/// Columns used for `trait` in `fold`: category filter from the feature set
/// and ablation, and trait-specific columns restricted to rubrics of source
/// prompts.
std::vector<std::size_t> fold_columns(const corpus::Dataset& data, const FoldPlan& fold,
                                      const RunConfig& cfg, const TraitTable& table);

/// 80/20 split of source essays stratified by prompt. Returns (train, val)
/// as indices into `rows`, each list sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const std::string> row_prompts, std::uint64_t seed, double val_fraction = 0.2);

/// Train on the fold's source prompts and score its target prompts. Returns
/// nullopt when no target essay carries the trait.
std::optional<FoldResult> run_fold(const corpus::Dataset& data, const FoldPlan& fold,
                                   const RunConfig& cfg, const TraitTable& table);

struct CvReport {
  std::string label;
  std::vector<FoldResult> folds;
  /// Unweighted mean over folds, per trait.
  std::map<std::string, double> trait_average;
  double overall_average() const;
};

CvReport run_cross_validation(const corpus::Dataset& data, std::span<const FoldPlan> plan,
                              const RunConfig& cfg, std::span<const TraitTable> tables);

struct AblationRow {
  FeatureCategory category;
  std::map<std::string, double> drop;  // per trait, base - ablated
  double average_drop = 0;
  CvReport ablated;
};

AblationRow ablate(const corpus::Dataset& data, std::span<const FoldPlan> plan,
                   const RunConfig& cfg, std::span<const TraitTable> tables,
                   const CvReport& base, FeatureCategory category);

/// Zero-shot direct scoring baseline over the same folds (no training).
CvReport run_llm_direct(const corpus::Dataset& data, std::span<const FoldPlan> plan,
                        const std::vector<std::string>& traits, gateway::Gateway& gw,
                        const std::string& model_id, int concurrency = 8);

/// Everything needed to reproduce a report.
struct RunManifest {
  std::string dataset_name;
  std::string dataset_digest;
  std::string config_digest;
  nlohmann::ordered_json config;
  std::map<std::string, std::string> extra;

  nlohmann::ordered_json to_json() const;
};

/// Per-fold rows: fold_id, trait, target prompts, sizes, qwk, epochs, hp.
std::string fold_table(std::span<const CvReport> reports, const RunManifest& manifest);
/// Markdown table with one row per report and one column per trait plus the average.
std::string summary_markdown(std::span<const CvReport> reports,
                             const std::vector<std::string>& traits, const RunManifest& manifest);
std::string ablation_table(std::span<const AblationRow> rows, const std::vector<std::string>& traits,
                           const RunManifest& manifest);

}  // namespace trates::eval
