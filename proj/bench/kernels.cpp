// Serial reference vs OpenMP version of each parallel kernel.

#include <benchmark/benchmark.h>

#include "pipeline.hpp"
#include "synthetic.hpp"
#include "trates/common/rng.hpp"
#include "trates/model/regressor.hpp"
#include "trates/text/generic_features.hpp"
#include "trates/traits/traits.hpp"
#include "trates/tuning/tuner.hpp"

namespace {

using namespace trates;

const testing::SyntheticCorpus& corpus() {
  static const auto c =
      testing::write_synthetic_corpus(testing::scratch_dir("bench"), {.essays_per_prompt = 100});
  return c;
}

void generic_features(benchmark::State& state, bool parallel) {
  std::vector<std::string> ids, texts;
  for (const auto& e : corpus().dataset.essays()) {
    ids.push_back(e.essay_id);
    texts.push_back(e.text);
  }
  const text::GenericFeatureExtractor fx;
  for (auto _ : state) {
    auto m = parallel ? text::extract_generic_parallel(fx, ids, texts)
                      : text::extract_generic_serial(fx, ids, texts);
    benchmark::DoNotOptimize(m.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ids.size()));
}

void trait_matrix(benchmark::State& state) {
  const auto& c = corpus();
  auto gw = testing::mock_gateway(c, 11, {});
  const auto batch = traits::generate_questions(*gw, "mock-model", c.dataset.rubric(testing::kSyntheticRubric),
                                                testing::kSyntheticTrait, "8th");
  const auto rows = c.dataset.essays_with_trait(testing::kSyntheticTrait);
  traits::TraitExtractionOptions opt;
  opt.concurrency = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto block = traits::extract_trait_matrix(*gw, "mock-model", c.dataset, rows, batch.questions,
                                              testing::kSyntheticTrait, opt);
    benchmark::DoNotOptimize(block.matrix.data().data());
  }
}

model::Rows random_rows(std::size_t n, std::size_t cols) {
  Rng rng(1);
  model::Rows r;
  r.cols = cols;
  std::vector<double> x(cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = rng.uniform();
    r.push(x, rng.uniform(0, 6));
  }
  return r;
}

void prediction(benchmark::State& state, bool parallel) {
  model::Hyperparameters hp;
  hp.hidden_layers = 3;
  hp.neurons = 32;
  const auto net = model::Network::init(hp, 90);
  const auto rows = random_rows(20000, 90);
  for (auto _ : state) {
    auto p = parallel ? model::predict_parallel(net, rows) : model::predict_serial(net, rows);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows.size()));
}

void tuning_stage(benchmark::State& state, bool parallel) {
  auto space = tuning::SearchSpace::standard();
  space.defaults.max_epochs = 5;
  const auto tr = random_rows(800, 90), va = random_rows(200, 90);
  const auto score = [&](std::span<const double> p) { return -model::mse(p, va.y); };
  for (auto _ : state) {
    auto res = tuning::sequential_tune(space, tr, va, score, 1, parallel);
    benchmark::DoNotOptimize(res.best.learning_rate);
  }
}

}  // namespace

BENCHMARK_CAPTURE(generic_features, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(generic_features, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK(trait_matrix)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(prediction, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(prediction, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tuning_stage, serial, false)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_CAPTURE(tuning_stage, parallel, true)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
