#include <gtest/gtest.h>

#include "trates/common/error.hpp"
#include "trates/common/rng.hpp"
#include "trates/tuning/tuner.hpp"

using namespace trates;

namespace {

model::Rows rows(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  model::Rows r;
  r.cols = 3;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform()};
    r.push(x, 2 * x[0] - x[1] + 0.5 * x[2]);
  }
  return r;
}

}  // namespace

TEST(SearchSpace, Counts) {
  EXPECT_EQ(tuning::SearchSpace::standard().model_count(), 29u);
  EXPECT_EQ(tuning::SearchSpace::single({}).model_count(), 6u);
  auto s = tuning::SearchSpace::standard();
  s.dropouts = {0.1, 0.2};  // default 0 missing
  EXPECT_THROW(s.validate(), ValidationError);
  s.dropouts.clear();
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Tuner, ParallelMatchesSerial) {
  auto space = tuning::SearchSpace::standard();
  space.defaults.max_epochs = 6;
  space.architectures = {{1, 16}, {1, 32}};
  space.l2s = {0.0, 1e-3};
  const auto tr = rows(200, 1), va = rows(50, 2);
  const auto score = [&](std::span<const double> p) { return -model::mse(p, va.y); };
  const auto a = tuning::sequential_tune(space, tr, va, score, 9, false);
  const auto b = tuning::sequential_tune(space, tr, va, score, 9, true);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.audit_table(), b.audit_table());
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(Tuner, ExactlyOneSelectedPerStage) {
  auto space = tuning::SearchSpace::standard();
  space.defaults.max_epochs = 3;
  const auto tr = rows(100, 3), va = rows(30, 4);
  const auto res = tuning::sequential_tune(
      space, tr, va, [&](std::span<const double> p) { return -model::mse(p, va.y); }, 1);
  std::vector<int> selected(6, 0);
  for (const auto& c : res.audit) selected[c.stage_index] += c.selected;
  EXPECT_EQ(selected, std::vector<int>(6, 1));
  // the winner of the last stage carries every earlier choice
  for (const auto& c : res.audit)
    if (c.selected && c.stage_index == 5) {
      auto hp = c.hp;
      hp.seed = res.best.seed;
      EXPECT_EQ(hp, res.best);
    }
}

TEST(Tuner, TiesGoToTheDefault) {
  auto space = tuning::SearchSpace::single({});
  space.defaults.max_epochs = 2;
  space.l2s = {0.0, 1e-6, 1e-5};
  const auto tr = rows(50, 5), va = rows(20, 6);
  const auto res = tuning::sequential_tune(space, tr, va, [](std::span<const double>) { return 0.5; }, 1);
  EXPECT_EQ(res.best.l2, 0.0);
}
