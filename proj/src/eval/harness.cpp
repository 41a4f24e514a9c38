#include <algorithm>
#include <cmath>
#include <numeric>

#include "trates/common/rng.hpp"
#include "trates/eval/evaluation.hpp"
#include "trates/scaling/scaling.hpp"
#include "trates/traits/traits.hpp"

namespace trates::eval {

std::vector<FoldPlan> leave_one_prompt_out(std::vector<std::string> prompt_ids) {
  std::sort(prompt_ids.begin(), prompt_ids.end());
  std::vector<FoldPlan> plan;
  for (const auto& target : prompt_ids) {
    FoldPlan f;
    f.fold_id = target;
    f.target = {target};
    for (const auto& p : prompt_ids)
      if (p != target) f.source.push_back(p);
    plan.push_back(std::move(f));
  }
  return plan;
}

std::vector<FoldPlan> grouped_folds(std::vector<std::string> prompt_ids, std::size_t groups,
                                    std::uint64_t seed) {
  if (groups == 0 || groups > prompt_ids.size())
    throw ValidationError("cannot cut " + std::to_string(prompt_ids.size()) + " prompts into " +
                          std::to_string(groups) + " folds");
  std::sort(prompt_ids.begin(), prompt_ids.end());
  Rng rng(derive_seed(seed, "folds"));
  rng.shuffle(prompt_ids);
  std::vector<FoldPlan> plan(groups);
  const std::size_t n = prompt_ids.size();
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t lo = g * n / groups, hi = (g + 1) * n / groups;
    plan[g].fold_id = "fold" + std::to_string(g + 1);
    plan[g].target.assign(prompt_ids.begin() + lo, prompt_ids.begin() + hi);
    std::sort(plan[g].target.begin(), plan[g].target.end());
  }
  for (auto& f : plan) {
    for (const auto& p : prompt_ids)
      if (std::find(f.target.begin(), f.target.end(), p) == f.target.end()) f.source.push_back(p);
    std::sort(f.source.begin(), f.source.end());
  }
  return plan;
}

void validate_plan(std::span<const FoldPlan> plan, std::span<const std::string> prompt_ids) {
  std::map<std::string, int> target_count;
  for (const auto& p : prompt_ids) target_count[p] = 0;
  for (const auto& f : plan) {
    if (f.target.empty()) throw ValidationError("fold " + f.fold_id + " has no target prompt");
    for (const auto& t : f.target) {
      if (std::find(f.source.begin(), f.source.end(), t) != f.source.end())
        throw ValidationError("fold " + f.fold_id + ": prompt " + t + " is both source and target");
      auto it = target_count.find(t);
      if (it == target_count.end())
        throw ValidationError("fold " + f.fold_id + ": unknown prompt " + t);
      ++it->second;
    }
    for (const auto& s : f.source)
      if (!target_count.count(s)) throw ValidationError("fold " + f.fold_id + ": unknown prompt " + s);
  }
  for (const auto& [p, n] : target_count)
    if (n != 1)
      throw ValidationError("prompt " + p + " is a target in " + std::to_string(n) + " folds");
}

std::string_view to_string(FeatureSet f) {
  switch (f) {
    case FeatureSet::kTrates: return "TRATES";
    case FeatureSet::kLlmF: return "LLM-F";
    case FeatureSet::kGpF: return "GP-F";
  }
  return "?";
}

std::optional<FeatureSet> parse_feature_set(std::string_view s) {
  std::string norm;
  for (char c : s) norm.push_back(c == '_' ? '-' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (FeatureSet f : {FeatureSet::kTrates, FeatureSet::kLlmF, FeatureSet::kGpF})
    if (to_string(f) == norm) return f;
  return std::nullopt;
}

bool feature_set_includes(FeatureSet f, FeatureCategory c) {
  switch (f) {
    case FeatureSet::kTrates: return true;
    case FeatureSet::kLlmF: return c == FeatureCategory::kTraitSpecific;
    case FeatureSet::kGpF: return c != FeatureCategory::kTraitSpecific;
  }
  return false;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["feature_set"] = to_string(feature_set);
  j["traits"] = traits;
  j["model_id"] = model_id;
  j["tune"] = tune;
  if (!tune) j["fixed"] = fixed.to_json();
  j["seed"] = seed;
  j["grade_scaling"] = grade_scaling;
  auto ex = nlohmann::ordered_json::array();
  for (auto c : excluded) ex.push_back(to_string(c));
  j["excluded"] = ex;
  j["optimizer"] = "adam(0.9, 0.999, 1e-8)";
  return j;
}

std::size_t AccessLog::target_reads_before_prediction() const {
  std::size_t n = 0;
  for (const auto& [phase, count] : target_reads)
    if (phase != "prediction") n += count;
  return n;
}

std::string rubric_of_column(std::string_view column) {
  if (column.substr(0, 2) != "q:") return {};
  const auto hash = column.rfind('#');
  if (hash == std::string_view::npos || hash < 2) return {};
  return std::string(column.substr(2, hash - 2));
}

std::vector<std::size_t> fold_columns(const corpus::Dataset& data, const FoldPlan& fold,
                                      const RunConfig& cfg, const TraitTable& table) {
  std::set<std::string> rubrics;
  for (const auto& p : fold.source)
    if (data.prompt(p).range_for(table.trait)) rubrics.insert(data.rubric_for(table.trait, p).rubric_id);
  std::vector<std::size_t> out;
  const auto& cols = table.matrix.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (!feature_set_includes(cfg.feature_set, cols[c].category)) continue;
    if (cfg.excluded.count(cols[c].category)) continue;
    if (cols[c].category == FeatureCategory::kTraitSpecific &&
        !rubrics.count(rubric_of_column(cols[c].name)))
      continue;
    out.push_back(c);
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const std::string> row_prompts, std::uint64_t seed, double val_fraction) {
  std::map<std::string, std::vector<std::size_t>> by_prompt;
  for (std::size_t i = 0; i < row_prompts.size(); ++i) by_prompt[row_prompts[i]].push_back(i);
  std::vector<std::size_t> train, val;
  for (auto& [prompt, idx] : by_prompt) {
    Rng rng(derive_seed(seed, "split=" + prompt));
    rng.shuffle(idx);
    std::size_t n_val = 0;
    if (idx.size() >= 2)
      n_val = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(idx.size()))), 1,
          idx.size() - 1);
    val.insert(val.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
    train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  if (train.empty() || val.empty())
    throw ValidationError("too few source essays for a train/validation split");
  return {std::move(train), std::move(val)};
}

namespace {

// QWK over rows that may span several prompts: pooled when every prompt
// shares one grid, else the mean of per-prompt values.
double grouped_qwk(const corpus::Dataset& data, const std::string& trait,
                   std::span<const std::string> prompts, std::span<const double> pred,
                   std::span<const double> gold) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < prompts.size(); ++i) groups[prompts[i]].push_back(i);
  const corpus::ScoreRange first = *data.prompt(groups.begin()->first).range_for(trait);
  bool shared = true;
  for (const auto& [p, idx] : groups) shared = shared && *data.prompt(p).range_for(trait) == first;
  if (shared) return qwk(pred, gold, first);
  double sum = 0;
  for (const auto& [p, idx] : groups) {
    std::vector<double> a, b;
    for (auto i : idx) {
      a.push_back(pred[i]);
      b.push_back(gold[i]);
    }
    sum += qwk(a, b, *data.prompt(p).range_for(trait));
  }
  return sum / static_cast<double>(groups.size());
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::optional<FoldResult> run_fold(const corpus::Dataset& data, const FoldPlan& fold,
                                   const RunConfig& cfg, const TraitTable& table) {
  const std::string& trait = table.trait;
  const FeatureMatrix& m = table.matrix;
  FoldResult res;
  res.fold_id = fold.fold_id;
  res.trait = trait;
  res.target_prompts = fold.target;

  // Partition rows using essay metadata only; no feature values are touched here.
  std::vector<std::size_t> source_rows, target_rows;
  std::vector<std::string> source_prompts, target_prompts;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto& essay = data.essay(m.row_ids()[r]);
    if (!essay.score(trait)) continue;
    if (contains(fold.source, essay.prompt_id)) {
      source_rows.push_back(r);
      source_prompts.push_back(essay.prompt_id);
    } else if (contains(fold.target, essay.prompt_id)) {
      target_rows.push_back(r);
      target_prompts.push_back(essay.prompt_id);
    }
  }
  if (target_rows.empty()) return std::nullopt;
  if (source_rows.empty())
    throw ValidationError("fold " + fold.fold_id + ": no source essays carry trait " + trait);

  const auto cols = fold_columns(data, fold, cfg, table);
  if (cols.empty()) throw ValidationError("fold " + fold.fold_id + ": no feature columns selected");
  std::vector<ColumnInfo> col_info;
  for (auto c : cols) col_info.push_back(m.columns()[c]);
  res.n_features = cols.size();

  std::set<std::size_t> target_set(target_rows.begin(), target_rows.end());
  auto read_row = [&](std::size_t r, const std::string& phase, std::vector<double>& out) {
    (target_set.count(r) ? res.access.target_reads : res.access.source_reads)[phase] += 1;
    out.resize(cols.size());
    const auto row = m.row(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out[k] = row[cols[k]];
  };

  // Normalizer statistics from source rows.
  FeatureMatrix src(col_info);
  std::vector<double> buf;
  for (auto r : source_rows) {
    read_row(r, "normalizer", buf);
    src.add_row(m.row_ids()[r], buf);
  }
  const auto norm = scaling::Normalizer::fit(src);

  std::map<std::string, scaling::ScaleSpec> specs;
  auto spec_for = [&](const std::string& prompt) -> const scaling::ScaleSpec& {
    auto it = specs.find(prompt);
    if (it == specs.end())
      it = specs.emplace(prompt, scaling::ScaleSpec::for_prompt(data, prompt, trait, cfg.grade_scaling))
               .first;
    return it->second;
  };

  const std::uint64_t fold_seed = derive_seed(cfg.seed, "fold=" + fold.fold_id + "|trait=" + trait);
  const auto [train_idx, val_idx] = stratified_split(source_prompts, derive_seed(fold_seed, "split"));

  model::Rows train_rows, val_rows;
  train_rows.cols = val_rows.cols = cols.size();
  std::vector<double> normed(cols.size());
  std::vector<std::string> val_prompts;
  std::vector<double> val_gold;
  for (auto i : train_idx) {
    const auto& essay = data.essay(m.row_ids()[source_rows[i]]);
    norm.apply_row(src.row(i), normed);
    train_rows.push(normed, scaling::scale_score(*essay.score(trait), spec_for(essay.prompt_id)));
  }
  for (auto i : val_idx) {
    const auto& essay = data.essay(m.row_ids()[source_rows[i]]);
    norm.apply_row(src.row(i), normed);
    val_rows.push(normed, scaling::scale_score(*essay.score(trait), spec_for(essay.prompt_id)));
    val_prompts.push_back(essay.prompt_id);
    val_gold.push_back(*essay.score(trait));
  }
  res.n_train = train_rows.size();
  res.n_val = val_rows.size();

  model::Hyperparameters hp;
  std::string tuning_json = "null";
  if (cfg.tune) {
    res.access.source_reads["tuning"] += train_rows.size() + val_rows.size();
    const tuning::ValidationScorer scorer = [&](std::span<const double> scaled) {
      std::vector<double> raw(scaled.size());
      for (std::size_t i = 0; i < scaled.size(); ++i)
        raw[i] = scaling::unscale_score(scaled[i], spec_for(val_prompts[i]));
      return grouped_qwk(data, trait, val_prompts, raw, val_gold);
    };
    auto tuned = tuning::sequential_tune(cfg.space, train_rows, val_rows, scorer,
                                         derive_seed(fold_seed, "tune"), cfg.parallel);
    hp = tuned.best;
    tuning_json = tuned.to_json().dump();
  } else {
    hp = cfg.fixed;
    hp.seed = derive_seed(fold_seed, "fixed");
  }
  res.access.source_reads["training"] += train_rows.size() + val_rows.size();
  auto trained = model::train(train_rows, val_rows, hp);
  res.hp = hp;
  res.epochs_run = trained.history.epochs_run();

  res.artifacts.columns = nlohmann::json(src.column_names()).dump();
  res.artifacts.normalizer = norm.to_json().dump();
  res.artifacts.tuning = tuning_json;
  res.artifacts.network = trained.network.to_json().dump();
  res.artifacts.history = trained.history.to_json().dump();

  // Prediction: the only phase that reads target rows.
  model::Rows target;
  target.cols = cols.size();
  for (auto r : target_rows) {
    read_row(r, "prediction", buf);
    norm.apply_row(buf, normed);
    target.push(normed, 0.0);
  }
  const auto scaled = model::predict_parallel(trained.network, target);
  for (std::size_t i = 0; i < target_rows.size(); ++i) {
    const auto& essay = data.essay(m.row_ids()[target_rows[i]]);
    res.essay_ids.push_back(essay.essay_id);
    res.predictions.push_back(scaling::unscale_score(scaled[i], spec_for(essay.prompt_id)));
    res.gold.push_back(*essay.score(trait));
  }
  res.n_target = target_rows.size();
  res.qwk = grouped_qwk(data, trait, target_prompts, res.predictions, res.gold);
  return res;
}

double CvReport::overall_average() const {
  if (trait_average.empty()) return std::nan("");
  double s = 0;
  for (const auto& [t, v] : trait_average) s += v;
  return s / static_cast<double>(trait_average.size());
}

namespace {

void fill_averages(CvReport& rep) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& f : rep.folds) {
    acc[f.trait].first += f.qwk;
    acc[f.trait].second += 1;
  }
  for (const auto& [t, a] : acc) rep.trait_average[t] = a.first / a.second;
}

const TraitTable& table_for(std::span<const TraitTable> tables, const std::string& trait) {
  for (const auto& t : tables)
    if (t.trait == trait) return t;
  throw ValidationError("no feature table for trait '" + trait +
                        "'; run `trates extract-features` for it first");
}

}  // namespace

CvReport run_cross_validation(const corpus::Dataset& data, std::span<const FoldPlan> plan,
                              const RunConfig& cfg, std::span<const TraitTable> tables) {
  CvReport rep;
  rep.label = std::string(to_string(cfg.feature_set));
  for (const auto& trait : cfg.traits) {
    const auto& table = table_for(tables, trait);
    for (const auto& fold : plan) {
      try {
        if (auto r = run_fold(data, fold, cfg, table)) rep.folds.push_back(std::move(*r));
      } catch (const Error& e) {
        throw Error("fold " + fold.fold_id + ", trait " + trait + ": " + e.what());
      }
    }
  }
  fill_averages(rep);
  return rep;
}

AblationRow ablate(const corpus::Dataset& data, std::span<const FoldPlan> plan,
                   const RunConfig& cfg, std::span<const TraitTable> tables,
                   const CvReport& base, FeatureCategory category) {
  RunConfig ab = cfg;
  ab.excluded.insert(category);
  AblationRow row;
  row.category = category;
  row.ablated = run_cross_validation(data, plan, ab, tables);
  row.ablated.label = "-" + std::string(to_string(category));
  double sum = 0;
  for (const auto& [trait, v] : base.trait_average) {
    auto it = row.ablated.trait_average.find(trait);
    if (it == row.ablated.trait_average.end()) continue;
    row.drop[trait] = v - it->second;
    sum += row.drop[trait];
  }
  row.average_drop = row.drop.empty() ? 0.0 : sum / static_cast<double>(row.drop.size());
  return row;
}

CvReport run_llm_direct(const corpus::Dataset& data, std::span<const FoldPlan> plan,
                        const std::vector<std::string>& traits, gateway::Gateway& gw,
                        const std::string& model_id, int concurrency) {
  CvReport rep;
  rep.label = "LLM-D";
  for (const auto& trait : traits) {
    for (const auto& fold : plan) {
      std::vector<std::size_t> rows;
      std::vector<std::string> prompts;
      for (std::size_t i = 0; i < data.essays().size(); ++i) {
        const auto& e = data.essays()[i];
        if (e.score(trait) && contains(fold.target, e.prompt_id)) {
          rows.push_back(i);
          prompts.push_back(e.prompt_id);
        }
      }
      if (rows.empty()) continue;
      FoldResult res;
      res.fold_id = fold.fold_id;
      res.trait = trait;
      res.target_prompts = fold.target;
      res.n_target = rows.size();
      res.predictions.assign(rows.size(), 0.0);
      std::vector<std::exception_ptr> errors(rows.size());
      const auto n = static_cast<long long>(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, concurrency))
      for (long long k = 0; k < n; ++k) {
        try {
          const auto& e = data.essays()[rows[k]];
          const auto& prompt = data.prompt(e.prompt_id);
          res.predictions[k] = trates::traits::llm_direct_score(gw, model_id, e, prompt,
                                                        data.rubric_for(trait, e.prompt_id), trait);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (auto i : rows) {
        res.essay_ids.push_back(data.essays()[i].essay_id);
        res.gold.push_back(*data.essays()[i].score(trait));
      }
      res.qwk = grouped_qwk(data, trait, prompts, res.predictions, res.gold);
      rep.folds.push_back(std::move(res));
    }
  }
  fill_averages(rep);
  return rep;
}

}  // namespace trates::eval
