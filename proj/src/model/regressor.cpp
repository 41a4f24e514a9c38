#include "trates/model/regressor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "trates/common/error.hpp"
#include "trates/common/rng.hpp"

namespace trates::model {

namespace {

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
constexpr double kLeakySlope = 0.01;
constexpr double kMinDelta = 1e-6;
constexpr int kLrPatience = 5;
constexpr int kStopPatience = 10;
constexpr double kLrFactor = 0.1;

struct Workspace {
  std::vector<std::vector<double>> z;     // pre-activations per hidden layer
  std::vector<std::vector<double>> a;     // a[0] = input copy, a[l] = hidden outputs
  std::vector<std::vector<double>> mask;  // dropout multipliers per hidden layer
  std::vector<double> delta, next_delta;
};

void size_workspace(const Network& net, Workspace& ws) {
  const auto& L = net.layers();
  const std::size_t hidden = L.size() - 1;
  ws.z.resize(hidden);
  ws.a.resize(hidden + 1);
  ws.mask.resize(hidden);
  ws.a[0].resize(L[0].in);
  for (std::size_t l = 0; l < hidden; ++l) {
    ws.z[l].resize(L[l].out);
    ws.a[l + 1].resize(L[l].out);
    ws.mask[l].assign(L[l].out, 1.0);
  }
}

double forward_cached(const Network& net, std::span<const double> x, Workspace& ws, bool masked) {
  const auto& L = net.layers();
  const Activation act = net.activation();
  std::copy(x.begin(), x.end(), ws.a[0].begin());
  for (std::size_t l = 0; l + 1 < L.size(); ++l) {
    const auto& layer = L[l];
    const auto& in = ws.a[l];
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* w = layer.w.data() + o * layer.in;
      double s = layer.b[o];
      for (std::size_t i = 0; i < layer.in; ++i) s += w[i] * in[i];
      ws.z[l][o] = s;
      ws.a[l + 1][o] = activate(act, s) * (masked ? ws.mask[l][o] : 1.0);
    }
  }
  const auto& head = L.back();
  const auto& in = ws.a[L.size() - 1];
  double s = head.b[0];
  for (std::size_t i = 0; i < head.in; ++i) s += head.w[i] * in[i];
  return s;
}

// Adds coef * d(pred)/d(params) to grad; `grad` is in parameters() order.
void backward(const Network& net, double coef, Workspace& ws, std::vector<double>& grad,
              const std::vector<std::size_t>& w_off, const std::vector<std::size_t>& b_off) {
  const auto& L = net.layers();
  const Activation act = net.activation();
  const std::size_t last = L.size() - 1;
  ws.delta.assign(1, coef);
  for (std::size_t l = last + 1; l-- > 0;) {
    const auto& layer = L[l];
    const auto& in = ws.a[l];
    double* gw = grad.data() + w_off[l];
    double* gb = grad.data() + b_off[l];
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double d = ws.delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      double* row = gw + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) row[i] += d * in[i];
    }
    if (l == 0) break;
    // Propagate into the previous hidden layer's pre-activation.
    ws.next_delta.assign(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double d = ws.delta[o];
      if (d == 0.0) continue;
      const double* w = layer.w.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) ws.next_delta[i] += w[i] * d;
    }
    const std::size_t h = l - 1;
    for (std::size_t i = 0; i < layer.in; ++i)
      ws.next_delta[i] *= ws.mask[h][i] * activate_grad(act, ws.z[h][i]);
    std::swap(ws.delta, ws.next_delta);
  }
}

void offsets(const Network& net, std::vector<std::size_t>& w_off, std::vector<std::size_t>& b_off) {
  std::size_t p = 0;
  w_off.clear();
  b_off.clear();
  for (const auto& layer : net.layers()) {
    w_off.push_back(p);
    p += layer.w.size();
    b_off.push_back(p);
    p += layer.b.size();
  }
}

std::vector<double> sample_weights(const Rows& rows, Loss loss) {
  if (!rows.weight.empty()) return rows.weight;
  if (loss == Loss::kWeightedMSE) return inverse_frequency_weights(rows.y);
  return std::vector<double>(rows.size(), 1.0);
}

double data_loss(const Network& net, const Rows& rows, std::span<const double> weights) {
  const auto pred = predict_serial(net, rows);
  return weighted_mse(pred, rows.y, weights);
}

}  // namespace

std::string_view to_string(Loss l) { return l == Loss::kMSE ? "MSE" : "WeightedMSE"; }

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kReLU: return "ReLU";
    case Activation::kSELU: return "SELU";
    case Activation::kLeakyReLU: return "LeakyReLU";
    case Activation::kTanh: return "Tanh";
    case Activation::kELU: return "ELU";
  }
  return "?";
}

namespace {

// Lowercase with '-' and '_' dropped, so "Weighted-MSE" == "weighted_mse".
std::string fold_name(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '-' && c != '_') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::optional<Loss> parse_loss(std::string_view s) {
  for (Loss l : {Loss::kMSE, Loss::kWeightedMSE})
    if (fold_name(s) == fold_name(to_string(l))) return l;
  return std::nullopt;
}

std::optional<Activation> parse_activation(std::string_view s) {
  for (Activation a : {Activation::kReLU, Activation::kSELU, Activation::kLeakyReLU,
                       Activation::kTanh, Activation::kELU})
    if (fold_name(s) == fold_name(to_string(a))) return a;
  return std::nullopt;
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::kReLU: return z > 0 ? z : 0.0;
    case Activation::kSELU: return kSeluLambda * (z > 0 ? z : kSeluAlpha * std::expm1(z));
    case Activation::kLeakyReLU: return z > 0 ? z : kLeakySlope * z;
    case Activation::kTanh: return std::tanh(z);
    case Activation::kELU: return z > 0 ? z : std::expm1(z);
  }
  return z;
}

double activate_grad(Activation a, double z) {
  switch (a) {
    case Activation::kReLU: return z > 0 ? 1.0 : 0.0;
    case Activation::kSELU: return z > 0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z);
    case Activation::kLeakyReLU: return z > 0 ? 1.0 : kLeakySlope;
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::kELU: return z > 0 ? 1.0 : std::exp(z);
  }
  return 1.0;
}

void Hyperparameters::validate() const {
  if (!(learning_rate > 0)) throw ValidationError("learning_rate must be positive");
  if (hidden_layers < 1 || hidden_layers > 3) throw ValidationError("hidden_layers must be 1-3");
  if (neurons < 1) throw ValidationError("neurons must be positive");
  if (!(l2 >= 0)) throw ValidationError("l2 must be >= 0");
  if (!(dropout >= 0 && dropout <= 0.5)) throw ValidationError("dropout must be in [0, 0.5]");
  if (max_epochs < 1) throw ValidationError("max_epochs must be positive");
}

nlohmann::ordered_json Hyperparameters::to_json() const {
  nlohmann::ordered_json j;
  j["loss"] = to_string(loss);
  j["learning_rate"] = learning_rate;
  j["hidden_layers"] = hidden_layers;
  j["neurons"] = neurons;
  j["activation"] = to_string(activation);
  j["l2"] = l2;
  j["dropout"] = dropout;
  j["batch_size"] = kBatchSize;
  j["seed"] = seed;
  j["max_epochs"] = max_epochs;
  return j;
}

Hyperparameters Hyperparameters::from_json(const nlohmann::json& j) {
  // Missing keys keep their defaults.
  Hyperparameters hp;
  if (j.contains("loss")) {
    const auto loss = parse_loss(j.at("loss").get<std::string>());
    if (!loss) throw ParseError("hyperparameters: unknown loss " + j.at("loss").dump());
    hp.loss = *loss;
  }
  if (j.contains("activation")) {
    const auto act = parse_activation(j.at("activation").get<std::string>());
    if (!act) throw ParseError("hyperparameters: unknown activation " + j.at("activation").dump());
    hp.activation = *act;
  }
  hp.learning_rate = j.value("learning_rate", hp.learning_rate);
  hp.hidden_layers = j.value("hidden_layers", hp.hidden_layers);
  hp.neurons = j.value("neurons", hp.neurons);
  hp.l2 = j.value("l2", hp.l2);
  hp.dropout = j.value("dropout", hp.dropout);
  hp.seed = j.value("seed", hp.seed);
  hp.max_epochs = j.value("max_epochs", hp.max_epochs);
  if (j.contains("batch_size") && j.at("batch_size").get<int>() != kBatchSize)
    throw ValidationError("batch_size is fixed at 128");
  hp.validate();
  return hp;
}

void Rows::push(std::span<const double> features, double target) {
  if (cols == 0 && y.empty()) cols = features.size();
  if (features.size() != cols) throw DimensionError("row width differs from earlier rows");
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(target);
}

double mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw DimensionError("mse: length mismatch");
  if (pred.empty()) return 0.0;
  double s = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double weighted_mse(std::span<const double> pred, std::span<const double> target,
                    std::span<const double> weights) {
  if (pred.size() != target.size() || pred.size() != weights.size())
    throw DimensionError("weighted_mse: length mismatch");
  if (pred.empty()) return 0.0;
  double s = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    s += weights[i] * (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

std::vector<double> inverse_frequency_weights(std::span<const double> targets) {
  std::map<long long, std::size_t> counts;
  for (double t : targets) ++counts[std::llround(t)];
  std::vector<double> w(targets.size());
  double sum = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    w[i] = 1.0 / static_cast<double>(counts[std::llround(targets[i])]);
    sum += w[i];
  }
  if (sum > 0) {
    const double scale = static_cast<double>(targets.size()) / sum;
    for (double& v : w) v *= scale;
  }
  return w;
}

Network Network::init(const Hyperparameters& hp, std::size_t input_dim) {
  if (input_dim == 0) throw DimensionError("network input dimension must be >= 1");
  hp.validate();
  Network net;
  net.activation_ = hp.activation;
  Rng rng(derive_seed(hp.seed, "init"));
  std::size_t in = input_dim;
  for (int l = 0; l <= hp.hidden_layers; ++l) {
    const std::size_t out = l == hp.hidden_layers ? 1 : static_cast<std::size_t>(hp.neurons);
    Layer layer{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    for (double& w : layer.w) w = rng.uniform(-limit, limit);
    net.layers_.push_back(std::move(layer));
    in = out;
  }
  return net;
}

double Network::forward(std::span<const double> x) const {
  if (x.size() != input_dim())
    throw DimensionError("expected " + std::to_string(input_dim()) + " features, got " +
                         std::to_string(x.size()));
  Workspace ws;
  size_workspace(*this, ws);
  return forward_cached(*this, x, ws, false);
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

std::vector<double> Network::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (const auto& l : layers_) {
    p.insert(p.end(), l.w.begin(), l.w.end());
    p.insert(p.end(), l.b.begin(), l.b.end());
  }
  return p;
}

void Network::set_parameters(std::span<const double> p) {
  if (p.size() != parameter_count()) throw DimensionError("parameter vector has wrong length");
  std::size_t k = 0;
  for (auto& l : layers_) {
    std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(k), l.w.size(), l.w.begin());
    k += l.w.size();
    std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(k), l.b.size(), l.b.begin());
    k += l.b.size();
  }
}

double Network::weight_norm2() const {
  double s = 0;
  for (const auto& l : layers_)
    for (double w : l.w) s += w * w;
  return s;
}

double Network::objective(const Rows& rows, Loss loss, double l2, std::vector<double>* grad) const {
  if (rows.cols != input_dim()) throw DimensionError("rows do not match the network input");
  const auto weights = sample_weights(rows, loss);
  Workspace ws;
  size_workspace(*this, ws);
  std::vector<std::size_t> w_off, b_off;
  offsets(*this, w_off, b_off);
  if (grad) grad->assign(parameter_count(), 0.0);
  const double n = static_cast<double>(rows.size());
  double total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double pred = forward_cached(*this, rows.row(i), ws, false);
    const double r = pred - rows.y[i];
    total += weights[i] * r * r;
    if (grad) backward(*this, 2.0 * weights[i] * r / n, ws, *grad, w_off, b_off);
  }
  double value = total / n + l2 * weight_norm2();
  if (grad && l2 > 0) {
    for (std::size_t l = 0; l < layers_.size(); ++l)
      for (std::size_t k = 0; k < layers_[l].w.size(); ++k)
        (*grad)[w_off[l] + k] += 2.0 * l2 * layers_[l].w[k];
  }
  return value;
}

nlohmann::ordered_json Network::to_json() const {
  nlohmann::ordered_json j;
  j["activation"] = to_string(activation_);
  j["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : layers_) {
    nlohmann::ordered_json lj;
    lj["in"] = l.in;
    lj["out"] = l.out;
    lj["weights"] = l.w;
    lj["biases"] = l.b;
    j["layers"].push_back(std::move(lj));
  }
  return j;
}

Network Network::from_json(const nlohmann::json& j) {
  Network net;
  const auto act = parse_activation(j.at("activation").get<std::string>());
  if (!act) throw ParseError("network: unknown activation");
  net.activation_ = *act;
  std::size_t prev_out = 0;
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.in = lj.at("in").get<std::size_t>();
    l.out = lj.at("out").get<std::size_t>();
    l.w = lj.at("weights").get<std::vector<double>>();
    l.b = lj.at("biases").get<std::vector<double>>();
    if (l.w.size() != l.in * l.out || l.b.size() != l.out || (prev_out && prev_out != l.in))
      throw ParseError("network: inconsistent layer shapes");
    prev_out = l.out;
    net.layers_.push_back(std::move(l));
  }
  if (net.layers_.empty() || net.layers_.back().out != 1)
    throw ParseError("network: output layer must have one unit");
  return net;
}

bool operator==(const Network& a, const Network& b) {
  if (a.activation_ != b.activation_ || a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l)
    if (a.layers_[l].w != b.layers_[l].w || a.layers_[l].b != b.layers_[l].b) return false;
  return true;
}

nlohmann::ordered_json TrainingHistory::to_json() const {
  nlohmann::ordered_json j;
  j["best_epoch"] = best_epoch;
  j["best_val_loss"] = best_val_loss;
  j["early_stopped"] = early_stopped;
  j["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : epochs)
    j["epochs"].push_back({{"epoch", e.epoch},
                           {"train_loss", e.train_loss},
                           {"val_loss", e.val_loss},
                           {"learning_rate", e.learning_rate}});
  return j;
}

TrainResult train(const Rows& train_rows, const Rows& val_rows, const Hyperparameters& hp) {
  if (train_rows.size() == 0 || val_rows.size() == 0)
    throw ValidationError("training and validation sets must be non-empty");
  if (train_rows.cols != val_rows.cols) throw DimensionError("train/validation widths differ");
  hp.validate();

  TrainResult result{Network::init(hp, train_rows.cols), {}};
  Network& net = result.network;
  TrainingHistory& hist = result.history;

  const auto train_w = sample_weights(train_rows, hp.loss);
  const auto val_w = sample_weights(val_rows, hp.loss);

  std::vector<std::size_t> w_off, b_off;
  offsets(net, w_off, b_off);
  const std::size_t P = net.parameter_count();
  std::vector<double> params = net.parameters();
  std::vector<double> grad(P), m(P, 0.0), v(P, 0.0);
  std::vector<bool> is_weight(P, false);
  for (std::size_t l = 0; l < net.layers().size(); ++l)
    std::fill_n(is_weight.begin() + static_cast<std::ptrdiff_t>(w_off[l]), net.layers()[l].w.size(), true);

  Rng rng(derive_seed(hp.seed, "train"));
  Workspace ws;
  size_workspace(net, ws);
  std::vector<std::size_t> order(train_rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long long step = 0;
  double lr = hp.learning_rate;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_params = params;
  int wait_lr = 0, wait_stop = 0;
  const std::size_t batch = static_cast<std::size_t>(Hyperparameters::kBatchSize);
  const double keep = 1.0 - hp.dropout;

  for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double nb = static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        if (hp.dropout > 0) {
          for (auto& mk : ws.mask)
            for (double& x : mk) x = rng.uniform() < hp.dropout ? 0.0 : 1.0 / keep;
        }
        const double pred = forward_cached(net, train_rows.row(i), ws, hp.dropout > 0);
        backward(net, 2.0 * train_w[i] * (pred - train_rows.y[i]) / nb, ws, grad, w_off, b_off);
      }
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < P; ++p) {
        double g = grad[p];
        if (is_weight[p]) g += 2.0 * hp.l2 * params[p];
        m[p] = beta1 * m[p] + (1.0 - beta1) * g;
        v[p] = beta2 * v[p] + (1.0 - beta2) * g * g;
        params[p] -= lr * (m[p] / c1) / (std::sqrt(v[p] / c2) + eps);
      }
      net.set_parameters(params);
    }
    if (hp.dropout > 0)
      for (auto& mk : ws.mask) std::fill(mk.begin(), mk.end(), 1.0);

    const double tl = data_loss(net, train_rows, train_w);
    const double vl = data_loss(net, val_rows, val_w);
    if (!std::isfinite(tl) || !std::isfinite(vl)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch << " (train loss " << tl << ", val loss " << vl
          << ", lr " << lr << ", " << to_string(hp.activation) << ")";
      throw Error(msg.str());
    }
    hist.epochs.push_back({epoch, tl, vl, lr});
    if (vl < best - kMinDelta) {
      best = vl;
      best_params = params;
      hist.best_epoch = epoch;
      wait_lr = wait_stop = 0;
    } else {
      ++wait_stop;
      if (++wait_lr >= kLrPatience) {
        lr *= kLrFactor;
        wait_lr = 0;
      }
      if (wait_stop >= kStopPatience) {
        hist.early_stopped = true;
        break;
      }
    }
  }
  hist.best_val_loss = best;
  net.set_parameters(best_params);
  return result;
}

std::vector<double> predict_serial(const Network& net, const Rows& rows) {
  if (rows.cols != net.input_dim()) throw DimensionError("rows do not match the network input");
  Workspace ws;
  size_workspace(net, ws);
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = forward_cached(net, rows.row(i), ws, false);
  return out;
}

std::vector<double> predict_parallel(const Network& net, const Rows& rows) {
  if (rows.cols != net.input_dim()) throw DimensionError("rows do not match the network input");
  std::vector<double> out(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel
  {
    Workspace ws;
    size_workspace(net, ws);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = forward_cached(net, rows.row(static_cast<std::size_t>(i)), ws, false);
  }
  return out;
}

}  // namespace trates::model
