#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trates/model/regressor.hpp"

namespace trates::cli {

/// One experiment, read from a JSON file. Relative paths resolve against the
/// directory holding the file. See docs/formats.md for every key.
struct ExperimentConfig {
  std::string dataset_format = "asap";  // asap | ellipse
  std::filesystem::path data_path;
  std::filesystem::path metadata_path;

  std::string model_id;
  std::string backend = "openai";  // openai | mock
  std::filesystem::path cache_dir;  // default: <output_dir>/cache
  std::size_t max_in_flight = 8;
  int max_retries = 3;
  int base_delay_ms = 500;
  int timeout_s = 120;
  std::uint64_t mock_seed = 0;
  int mock_questions = 5;
  std::filesystem::path mock_planted;  // optional TSV: essay_id, attribute

  std::vector<std::string> traits;  // empty: every trait in the dataset
  std::vector<std::string> runs{"TRATES"};
  std::string fold_plan = "lopo";  // lopo | grouped
  std::size_t fold_groups = 11;
  bool tune = true;
  model::Hyperparameters fixed;
  bool grade_scaling = true;
  bool imputation = true;
  std::uint64_t seed = 42;
  int concurrency = 8;
  std::filesystem::path output_dir;

  static ExperimentConfig from_json(const std::string& text, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
  /// Throws ValidationError naming the first problem.
  void validate() const;
};

/// Runs the command line; returns the process exit code (0 success, 1 error,
/// 2 usage error). Errors are printed to stderr.
int run(int argc, const char* const* argv);

}  // namespace trates::cli
