#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace trates::model {

enum class Loss { kMSE, kWeightedMSE };
enum class Activation { kReLU, kSELU, kLeakyReLU, kTanh, kELU };

std::string_view to_string(Loss l);
std::string_view to_string(Activation a);
std::optional<Loss> parse_loss(std::string_view s);
std::optional<Activation> parse_activation(std::string_view s);

double activate(Activation a, double z);
/// d activate / dz at z.
double activate_grad(Activation a, double z);

struct Hyperparameters {
  static constexpr int kBatchSize = 128;

  Loss loss = Loss::kMSE;
  double learning_rate = 1e-3;
  int hidden_layers = 1;
  int neurons = 32;
  Activation activation = Activation::kReLU;
  double l2 = 0.0;
  double dropout = 0.0;
  std::uint64_t seed = 0;
  int max_epochs = 300;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static Hyperparameters from_json(const nlohmann::json& j);
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Row-major design matrix with targets and optional per-sample weights.
struct Rows {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weight;  // empty: all ones
  std::size_t cols = 0;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * cols, cols}; }
  void push(std::span<const double> features, double target);
};

double mse(std::span<const double> pred, std::span<const double> target);
double weighted_mse(std::span<const double> pred, std::span<const double> target,
                    std::span<const double> weights);
/// Inverse frequency of each target rounded to the nearest integer,
/// normalized so the weights average to 1.
std::vector<double> inverse_frequency_weights(std::span<const double> targets);

/// Dense feed-forward network with a linear scalar output.
class Network {
 public:
  struct Layer {
    std::size_t in = 0, out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;
  };

  Network() = default;

  /// He-style uniform weights (limit sqrt(6 / fan_in)) from hp.seed, zero biases.
  static Network init(const Hyperparameters& hp, std::size_t input_dim);

  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  Activation activation() const noexcept { return activation_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& layers() noexcept { return layers_; }

  /// Inference pass; dropout never applies here.
  double forward(std::span<const double> x) const;

  /// All weights then biases, layer by layer.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> p);
  std::size_t parameter_count() const;
  /// Squared L2 norm of the weight matrices (biases excluded).
  double weight_norm2() const;

  /// Objective = data loss + l2 * sum(W^2) over `rows` (no dropout).
  /// When `grad` is non-null it receives d objective / d parameters.
  double objective(const Rows& rows, Loss loss, double l2, std::vector<double>* grad) const;

  nlohmann::ordered_json to_json() const;
  static Network from_json(const nlohmann::json& j);

  friend bool operator==(const Network&, const Network&);

 private:
  std::vector<Layer> layers_;
  Activation activation_ = Activation::kReLU;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0;
  double val_loss = 0;
  double learning_rate = 0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = 0;
  bool early_stopped = false;

  int epochs_run() const { return static_cast<int>(epochs.size()); }
  nlohmann::ordered_json to_json() const;
};

struct TrainResult {
  Network network;
  TrainingHistory history;
};

/// Mini-batch Adam (0.9, 0.999, 1e-8), batch 128, L2 on weights, inverted
/// dropout on hidden activations. Learning rate x0.1 after 5 epochs without
/// a validation improvement of at least 1e-6; stop after 10; best-epoch
/// weights are restored. Sample weights for WeightedMSE are derived from
/// the targets of each set when they are not supplied.
TrainResult train(const Rows& train, const Rows& val, const Hyperparameters& hp);

/// Predictions for every row; the parallel version is bit-identical.
std::vector<double> predict_serial(const Network& net, const Rows& rows);
std::vector<double> predict_parallel(const Network& net, const Rows& rows);

}  // namespace trates::model
