#include "trates/tuning/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "trates/common/error.hpp"
#include "trates/common/rng.hpp"

namespace trates::tuning {

namespace {

using model::Hyperparameters;

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

struct Stage {
  std::string name;
  std::vector<std::string> labels;
  std::vector<std::function<void(Hyperparameters&)>> apply;
  std::size_t default_index = 0;
};

template <typename T, typename Label, typename Set>
Stage make_stage(std::string name, const std::vector<T>& values, const T& def, Label label, Set set) {
  Stage st;
  st.name = std::move(name);
  bool found = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    st.labels.push_back(label(values[i]));
    st.apply.push_back([v = values[i], set](Hyperparameters& hp) { set(hp, v); });
    if (!found && values[i] == def) {
      st.default_index = i;
      found = true;
    }
  }
  if (values.empty()) throw ValidationError("search stage '" + st.name + "' has no candidates");
  if (!found) throw ValidationError("search stage '" + st.name + "' does not contain its default");
  return st;
}

std::vector<Stage> build_stages(const SearchSpace& s) {
  const auto& d = s.defaults;
  std::vector<Stage> st;
  st.push_back(make_stage(
      "loss", s.losses, d.loss, [](model::Loss l) { return std::string(model::to_string(l)); },
      [](Hyperparameters& hp, model::Loss l) { hp.loss = l; }));
  st.push_back(make_stage(
      "learning_rate", s.learning_rates, d.learning_rate, fmt,
      [](Hyperparameters& hp, double v) { hp.learning_rate = v; }));
  st.push_back(make_stage(
      "architecture", s.architectures, std::pair{d.hidden_layers, d.neurons},
      [](const std::pair<int, int>& a) {
        return std::to_string(a.first) + "x" + std::to_string(a.second);
      },
      [](Hyperparameters& hp, const std::pair<int, int>& a) {
        hp.hidden_layers = a.first;
        hp.neurons = a.second;
      }));
  st.push_back(make_stage(
      "activation", s.activations, d.activation,
      [](model::Activation a) { return std::string(model::to_string(a)); },
      [](Hyperparameters& hp, model::Activation a) { hp.activation = a; }));
  st.push_back(make_stage("l2", s.l2s, d.l2, fmt, [](Hyperparameters& hp, double v) { hp.l2 = v; }));
  st.push_back(make_stage("dropout", s.dropouts, d.dropout, fmt,
                          [](Hyperparameters& hp, double v) { hp.dropout = v; }));
  return st;
}

}  // namespace

SearchSpace SearchSpace::standard() {
  using model::Activation;
  SearchSpace s;
  s.losses = {model::Loss::kMSE, model::Loss::kWeightedMSE};
  s.learning_rates = {0.01, 0.001, 0.0001};
  s.architectures = {{1, 16}, {1, 32}, {2, 16}, {2, 32}, {3, 16}, {3, 32}};
  s.activations = {Activation::kReLU, Activation::kSELU, Activation::kLeakyReLU, Activation::kTanh,
                   Activation::kELU};
  s.l2s = {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1};
  s.dropouts = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  return s;
}

SearchSpace SearchSpace::single(const model::Hyperparameters& d) {
  SearchSpace s;
  s.defaults = d;
  s.losses = {d.loss};
  s.learning_rates = {d.learning_rate};
  s.architectures = {{d.hidden_layers, d.neurons}};
  s.activations = {d.activation};
  s.l2s = {d.l2};
  s.dropouts = {d.dropout};
  return s;
}

std::size_t SearchSpace::model_count() const {
  return losses.size() + learning_rates.size() + architectures.size() + activations.size() +
         l2s.size() + dropouts.size();
}

void SearchSpace::validate() const { build_stages(*this); }

std::string TuneResult::audit_table() const {
  std::ostringstream out;
  out << "stage\tcandidate\tvalue\tval_qwk\tbest_val_loss\tepochs\tselected\n";
  for (const auto& c : audit)
    out << c.stage << '\t' << c.candidate << '\t' << c.value << '\t' << c.val_qwk << '\t'
        << c.best_val_loss << '\t' << c.epochs_run << '\t' << (c.selected ? 1 : 0) << '\n';
  return out.str();
}

nlohmann::ordered_json TuneResult::to_json() const {
  nlohmann::ordered_json j;
  j["best"] = best.to_json();
  j["audit"] = nlohmann::ordered_json::array();
  for (const auto& c : audit)
    j["audit"].push_back({{"stage", c.stage},
                          {"candidate", c.candidate},
                          {"value", c.value},
                          {"hyperparameters", c.hp.to_json()},
                          {"val_qwk", c.val_qwk},
                          {"best_val_loss", c.best_val_loss},
                          {"epochs_run", c.epochs_run},
                          {"selected", c.selected}});
  return j;
}

TuneResult sequential_tune(const SearchSpace& space, const model::Rows& train,
                           const model::Rows& val, const ValidationScorer& score,
                           std::uint64_t seed, bool parallel) {
  const auto stages = build_stages(space);
  TuneResult result;
  Hyperparameters current = space.defaults;

  for (std::size_t si = 0; si < stages.size(); ++si) {
    const Stage& st = stages[si];
    const std::size_t n = st.labels.size();
    std::vector<CandidateResult> rows(n);
    std::vector<std::exception_ptr> errors(n);
    for (std::size_t c = 0; c < n; ++c) {
      Hyperparameters hp = current;
      st.apply[c](hp);
      hp.seed = derive_seed(seed, st.name + "=" + st.labels[c]);
      rows[c] = {st.name, si, c, st.labels[c], hp, 0.0, 0.0, 0, false};
    }
    const auto run = [&](std::size_t c) {
      try {
        const auto trained = model::train(train, val, rows[c].hp);
        const auto pred = model::predict_serial(trained.network, val);
        const double q = score(pred);
        rows[c].val_qwk = std::isnan(q) ? -2.0 : q;
        rows[c].best_val_loss = trained.history.best_val_loss;
        rows[c].epochs_run = trained.history.epochs_run();
      } catch (...) {
        errors[c] = std::current_exception();
      }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n); ++c)
        run(static_cast<std::size_t>(c));
    } else {
      for (std::size_t c = 0; c < n; ++c) run(c);
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!errors[c]) continue;
      try {
        std::rethrow_exception(errors[c]);
      } catch (const std::exception& e) {
        throw Error("tuning stage '" + st.name + "' candidate " + st.labels[c] + ": " + e.what());
      }
    }
    double top = rows[0].val_qwk;
    for (const auto& r : rows) top = std::max(top, r.val_qwk);
    std::size_t winner = st.default_index;
    if (rows[winner].val_qwk != top) {
      for (std::size_t c = 0; c < n; ++c)
        if (rows[c].val_qwk == top) {
          winner = c;
          break;
        }
    }
    rows[winner].selected = true;
    st.apply[winner](current);
    result.audit.insert(result.audit.end(), rows.begin(), rows.end());
  }
  current.seed = seed;
  result.best = current;
  return result;
}

}  // namespace trates::tuning
