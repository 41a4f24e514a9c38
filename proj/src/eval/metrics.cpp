#include <algorithm>
#include <cmath>

#include "trates/eval/evaluation.hpp"

namespace trates::eval {

double qwk(std::span<const double> pred, std::span<const double> gold,
           const corpus::ScoreRange& grid) {
  if (pred.size() != gold.size())
    throw ValidationError("qwk: length mismatch (" + std::to_string(pred.size()) + " vs " +
                          std::to_string(gold.size()) + ")");
  if (pred.empty()) throw ValidationError("qwk: no ratings");
  const std::size_t k = grid.grid_size();
  std::vector<double> observed(k * k, 0.0), hist_p(k, 0.0), hist_g(k, 0.0);
  auto index = [&](double v) {
    auto i = grid.grid_index(v);
    if (!i) throw ValidationError("qwk: value " + std::to_string(v) + " is off the grid");
    return *i;
  };
  for (std::size_t n = 0; n < pred.size(); ++n) {
    const std::size_t i = index(pred[n]), j = index(gold[n]);
    observed[i * k + j] += 1.0;
    hist_p[i] += 1.0;
    hist_g[j] += 1.0;
  }
  if (k == 1) return 1.0;
  const double total = static_cast<double>(pred.size());
  const double denom_w = static_cast<double>((k - 1) * (k - 1));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      const double w = d * d / denom_w;
      num += w * observed[i * k + j];
      den += w * hist_p[i] * hist_g[j] / total;
    }
  }
  if (den == 0.0) return num == 0.0 ? 1.0 : -1.0;
  return 1.0 - num / den;
}

double qwk(std::span<const double> pred, std::span<const double> gold, double s_min, double s_max,
           double step) {
  return qwk(pred, gold, corpus::ScoreRange{s_min, s_max, step});
}

}  // namespace trates::eval
