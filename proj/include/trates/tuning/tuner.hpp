#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "trates/model/regressor.hpp"

namespace trates::tuning {

/// Candidate values per stage, tuned in this order: loss, learning rate,
/// (hidden layers x neurons), activation, l2, dropout.
struct SearchSpace {
  std::vector<model::Loss> losses;
  std::vector<double> learning_rates;
  std::vector<std::pair<int, int>> architectures;  // (hidden layers, neurons)
  std::vector<model::Activation> activations;
  std::vector<double> l2s;
  std::vector<double> dropouts;
  model::Hyperparameters defaults;

  /// The full grid: 2 + 3 + 6 + 5 + 7 + 6 = 29 candidates.
  static SearchSpace standard();
  /// One candidate per stage, each equal to the default.
  static SearchSpace single(const model::Hyperparameters& defaults);

  std::size_t model_count() const;
  /// Throws when a stage is empty or does not contain its default.
  void validate() const;
};

inline constexpr const char* kStageNames[] = {"loss", "learning_rate", "architecture",
                                              "activation", "l2", "dropout"};

struct CandidateResult {
  std::string stage;
  std::size_t stage_index = 0;  // position of the stage, 0-5
  std::size_t candidate = 0;    // position within the stage
  std::string value;
  model::Hyperparameters hp;
  double val_qwk = 0;
  double best_val_loss = 0;
  int epochs_run = 0;
  bool selected = false;
};

struct TuneResult {
  model::Hyperparameters best;
  std::vector<CandidateResult> audit;

  /// Tab-separated audit trail, one row per trained candidate.
  std::string audit_table() const;
  nlohmann::ordered_json to_json() const;
};

/// Scores validation predictions (on the scaled target axis); higher is better.
using ValidationScorer = std::function<double(std::span<const double> scaled_predictions)>;

/// One-at-a-time search. Each candidate trains with a seed derived from
/// `seed` and its stage/value; the winner of a stage is fixed before the
/// next starts. Ties go to the stage default, then to the earlier candidate.
/// With `parallel`, candidates of one stage train concurrently; the result
/// does not depend on it.
TuneResult sequential_tune(const SearchSpace& space, const model::Rows& train,
                           const model::Rows& val, const ValidationScorer& score,
                           std::uint64_t seed, bool parallel = true);

}  // namespace trates::tuning
