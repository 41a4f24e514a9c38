#include "trates/cli/app.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "trates/common/digest.hpp"
#include "trates/common/error.hpp"
#include "trates/common/matrix_io.hpp"
#include "trates/corpus/loaders.hpp"
#include "trates/corpus/prompt_features.hpp"
#include "trates/eval/evaluation.hpp"
#include "trates/gateway/gateway.hpp"
#include "trates/text/generic_features.hpp"
#include "trates/traits/traits.hpp"

namespace trates::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c
                                                                                                  : '_');
  return out.empty() ? "_" : out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    const auto& d = j.at("dataset");
    c.dataset_format = d.value("format", "asap");
    c.data_path = resolve(base_dir, d.at("data").get<std::string>());
    c.metadata_path = resolve(base_dir, d.at("metadata").get<std::string>());
    c.model_id = j.value("model_id", "");
    if (j.contains("gateway")) {
      const auto& g = j["gateway"];
      c.backend = g.value("backend", c.backend);
      c.cache_dir = resolve(base_dir, g.value("cache_dir", ""));
      c.max_in_flight = g.value("max_in_flight", c.max_in_flight);
      c.max_retries = g.value("max_retries", c.max_retries);
      c.base_delay_ms = g.value("base_delay_ms", c.base_delay_ms);
      c.timeout_s = g.value("timeout_s", c.timeout_s);
      if (g.contains("mock")) {
        const auto& m = g["mock"];
        c.mock_seed = m.value("seed", c.mock_seed);
        c.mock_questions = m.value("questions_per_rubric", c.mock_questions);
        c.mock_planted = resolve(base_dir, m.value("planted", ""));
      }
    }
    c.traits = j.value("traits", c.traits);
    c.runs = j.value("runs", c.runs);
    if (j.contains("folds")) {
      c.fold_plan = j["folds"].value("plan", c.fold_plan);
      c.fold_groups = j["folds"].value("groups", c.fold_groups);
    }
    if (j.contains("tuning")) {
      const auto& t = j["tuning"];
      const std::string mode = t.value("mode", "tune");
      if (mode != "tune" && mode != "fixed")
        throw ValidationError("config: tuning.mode must be \"tune\" or \"fixed\"");
      c.tune = mode == "tune";
      if (t.contains("fixed")) c.fixed = model::Hyperparameters::from_json(t["fixed"]);
    }
    c.grade_scaling = j.value("grade_scaling", c.grade_scaling);
    c.imputation = j.value("imputation", c.imputation);
    c.seed = j.value("seed", c.seed);
    c.concurrency = j.value("concurrency", c.concurrency);
    c.output_dir = resolve(base_dir, j.value("output_dir", "out"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  return from_json(read_file(path), path.parent_path());
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["dataset"] = {{"format", dataset_format},
                  {"data", data_path.string()},
                  {"metadata", metadata_path.string()}};
  j["model_id"] = model_id;
  j["gateway"] = {{"backend", backend},
                  {"cache_dir", cache_dir.string()},
                  {"max_in_flight", max_in_flight},
                  {"max_retries", max_retries},
                  {"base_delay_ms", base_delay_ms},
                  {"timeout_s", timeout_s}};
  if (backend == "mock")
    j["gateway"]["mock"] = {{"seed", mock_seed},
                            {"questions_per_rubric", mock_questions},
                            {"planted", mock_planted.string()}};
  j["traits"] = traits;
  j["runs"] = runs;
  j["folds"] = {{"plan", fold_plan}, {"groups", fold_groups}};
  j["tuning"] = {{"mode", tune ? "tune" : "fixed"}};
  if (!tune) j["tuning"]["fixed"] = fixed.to_json();
  j["grade_scaling"] = grade_scaling;
  j["imputation"] = imputation;
  j["seed"] = seed;
  j["concurrency"] = concurrency;
  j["output_dir"] = output_dir.string();
  return j;
}

void ExperimentConfig::validate() const {
  if (dataset_format != "asap" && dataset_format != "ellipse")
    throw ValidationError("config: dataset.format must be \"asap\" or \"ellipse\"");
  for (const auto& [p, what] : {std::pair{data_path, "dataset.data"}, {metadata_path, "dataset.metadata"}})
    if (!fs::exists(p)) throw ValidationError(std::string("config: ") + what + " does not exist: " + p.string());
  if (!mock_planted.empty() && !fs::exists(mock_planted))
    throw ValidationError("config: gateway.mock.planted does not exist: " + mock_planted.string());
  if (model_id.empty()) throw ValidationError("config: model_id is required");
  if (backend != "openai" && backend != "mock")
    throw ValidationError("config: gateway.backend must be \"openai\" or \"mock\"");
  if (fold_plan != "lopo" && fold_plan != "grouped")
    throw ValidationError("config: folds.plan must be \"lopo\" or \"grouped\"");
  for (const auto& r : runs)
    if (r != "LLM-D" && !eval::parse_feature_set(r))
      throw ValidationError("config: unknown run '" + r + "' (TRATES, LLM-F, GP-F, LLM-D)");
  if (max_in_flight == 0 || concurrency <= 0)
    throw ValidationError("config: max_in_flight and concurrency must be positive");
  if (!tune) fixed.validate();
}

namespace {

/// Exclusive lock on the output directory for the lifetime of a command.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) : path_(dir / ".trates.lock") {
    fs::create_directories(dir);
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0)
      throw Error("output directory " + dir.string() + " is locked by another trates process (" +
                  path_.string() + "); remove the file if that process is gone");
    const std::string pid = std::to_string(::getpid()) + "\n";
    if (::write(fd_, pid.data(), pid.size()) < 0) {
    }
  }
  ~DirLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

struct Context {
  ExperimentConfig cfg;
  corpus::Dataset data;
  std::string digest;
  std::vector<std::string> traits;

  fs::path questions_dir() const { return cfg.output_dir / "questions" / slug(cfg.model_id); }
  fs::path features_dir() const { return cfg.output_dir / "features" / slug(cfg.model_id); }
  fs::path reports_dir() const { return cfg.output_dir / "reports"; }
  fs::path batch_path(const std::string& rubric_id) const {
    return questions_dir() / (slug(rubric_id) + ".json");
  }
  fs::path trait_path(const std::string& trait) const {
    return features_dir() / ("trait_" + slug(trait) + ".tsv");
  }

  MatrixMeta meta(const std::string& kind) const {
    return {{"artifact", kind},
            {"config_digest", digest},
            {"dataset_digest", data.digest()},
            {"model_id", cfg.model_id},
            {"seed", std::to_string(cfg.seed)},
            {"template_version", std::string(traits::kTemplateVersion)}};
  }
};

Context load_context(ExperimentConfig cfg) {
  cfg.validate();
  Context ctx;
  ctx.data = cfg.dataset_format == "ellipse" ? corpus::load_ellipse(cfg.data_path, cfg.metadata_path)
                                             : corpus::load_asap(cfg.data_path, cfg.metadata_path);
  const auto all = ctx.data.traits();
  ctx.traits = cfg.traits.empty() ? all : cfg.traits;
  for (const auto& t : ctx.traits)
    if (std::find(all.begin(), all.end(), t) == all.end())
      throw ValidationError("trait '" + t + "' is not scored in the dataset");
  if (cfg.cache_dir.empty()) cfg.cache_dir = cfg.output_dir / "cache";
  // Covers everything that changes extracted artifacts; evaluation settings
  // are recorded in the report manifest instead.
  FieldDigest d;
  d.add(ctx.data.digest()).add(cfg.model_id).add(cfg.backend).add(traits::kTemplateVersion);
  d.add(cfg.imputation ? "impute" : "strict");
  if (cfg.backend == "mock")
    d.add(std::to_string(cfg.mock_seed)).add(std::to_string(cfg.mock_questions))
        .add(cfg.mock_planted.empty() ? "" : sha256_hex(read_file(cfg.mock_planted)));
  ctx.digest = d.hex().substr(0, 16);
  ctx.cfg = std::move(cfg);
  return ctx;
}

std::unique_ptr<gateway::Gateway> make_gateway(const Context& ctx) {
  const auto& c = ctx.cfg;
  std::shared_ptr<gateway::Backend> backend;
  if (c.backend == "mock") {
    gateway::MockConfig mc;
    mc.seed = c.mock_seed;
    mc.questions_per_rubric = c.mock_questions;
    if (!c.mock_planted.empty()) {
      for (const auto& row : corpus::parse_tsv(read_file(c.mock_planted))) {
        if (row.size() < 2 || row[0] == "essay_id") continue;
        mc.planted[row[0]] = std::stod(row[1]);
      }
    }
    backend = std::make_shared<gateway::MockBackend>(std::move(mc));
  } else {
    auto hc = gateway::HttpConfig::from_env();
    hc.timeout = std::chrono::seconds(c.timeout_s);
    backend = std::make_shared<gateway::OpenAIBackend>(std::move(hc));
  }
  gateway::RetryPolicy rp{c.max_retries, std::chrono::milliseconds(c.base_delay_ms)};
  return std::make_unique<gateway::Gateway>(backend, gateway::ResponseCache(c.cache_dir),
                                            c.max_in_flight, rp);
}

void print_stats(const gateway::Gateway& gw) {
  const auto s = gw.stats();
  std::cerr << "gateway: " << s.backend_calls << " backend calls, " << s.cache_hits
            << " cache hits, " << s.retries << " retries, " << s.corrupt_entries
            << " corrupt cache entries\n";
}

std::vector<const corpus::RubricDoc*> rubrics_of(const corpus::Dataset& data,
                                                 const std::string& trait) {
  std::vector<const corpus::RubricDoc*> out;
  for (const auto& p : data.prompts_with_trait(trait)) {
    try {
      out.push_back(&data.rubric_for(trait, p));
    } catch (const Error& e) {
      throw ValidationError("no rubric for trait '" + trait + "' on prompt '" + p + "': " + e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->rubric_id < b->rubric_id; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int cmd_generate_questions(const Context& ctx, bool force) {
  DirLock lock(ctx.cfg.output_dir);
  auto gw = make_gateway(ctx);
  std::size_t generated = 0, skipped = 0;
  for (const auto& trait : ctx.traits) {
    for (const auto* rubric : rubrics_of(ctx.data, trait)) {
      const auto path = ctx.batch_path(rubric->rubric_id);
      if (fs::exists(path)) {
        if (!force) {
          traits::QuestionBatch::load(path);  // must still parse
          ++skipped;
          continue;
        }
        const auto archive = ctx.questions_dir() / "archive";
        fs::create_directories(archive);
        int n = 1;
        fs::path dest;
        do {
          dest = archive / (slug(rubric->rubric_id) + "." + std::to_string(n++) + ".json");
        } while (fs::exists(dest));
        fs::rename(path, dest);
      }
      std::vector<int> grades;
      for (const auto& p : rubric->prompt_ids)
        if (auto* ps = ctx.data.find_prompt(p)) grades.push_back(ps->grade_level);
      try {
        auto batch = traits::generate_questions(*gw, ctx.cfg.model_id, *rubric, trait,
                                                traits::grade_range_text(grades), force);
        batch.config_digest = ctx.digest;
        batch.save(path);
        std::cout << rubric->rubric_id << '\t' << trait << '\t' << batch.questions.size()
                  << " questions\n";
        ++generated;
      } catch (const Error& e) {
        throw Error("rubric " + rubric->rubric_id + " (trait " + trait + "): " + e.what());
      }
    }
  }
  std::cerr << "generated " << generated << " batches, kept " << skipped << " existing\n";
  print_stats(*gw);
  return 0;
}

void check_digest(const MatrixMeta& meta, const Context& ctx, const fs::path& path,
                  bool allow_mixed) {
  auto it = meta.find("config_digest");
  const std::string found = it == meta.end() ? "" : it->second;
  if (found == ctx.digest) return;
  if (!allow_mixed)
    throw Error(path.string() + " was produced under config digest '" + found +
                "' but the current digest is '" + ctx.digest +
                "'; re-run extraction or pass --allow-mixed");
  std::cerr << "warning: mixing artifacts: " << path.string() << " has digest " << found << "\n";
}

int cmd_extract_features(const Context& ctx) {
  DirLock lock(ctx.cfg.output_dir);
  fs::create_directories(ctx.features_dir());
  const auto& essays = ctx.data.essays();
  std::vector<std::size_t> all(essays.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  write_matrix_tsv(ctx.features_dir() / "prompt.tsv", corpus::prompt_feature_block(ctx.data, all),
                   ctx.meta("prompt-features"));

  const auto generic_path = ctx.features_dir() / "generic.tsv";
  bool have_generic = false;
  if (fs::exists(generic_path)) {
    MatrixMeta m;
    const auto existing = read_matrix_tsv(generic_path, &m);
    have_generic = m["config_digest"] == ctx.digest && existing.rows() == essays.size() &&
                   existing.cols() == text::feature_registry().size();
  }
  if (!have_generic) {
    std::vector<std::string> ids, texts;
    for (const auto& e : essays) {
      ids.push_back(e.essay_id);
      texts.push_back(e.text);
    }
    text::GenericFeatureExtractor fx;
    write_matrix_tsv(generic_path, text::extract_generic_parallel(fx, ids, texts),
                     ctx.meta("generic-features"));
    std::cerr << "generic features: " << essays.size() << " essays\n";
  }

  auto gw = make_gateway(ctx);
  for (const auto& trait : ctx.traits) {
    std::vector<traits::QuestionBatch> batches;
    for (const auto* rubric : rubrics_of(ctx.data, trait)) {
      const auto path = ctx.batch_path(rubric->rubric_id);
      if (!fs::exists(path))
        throw Error("no question batch for rubric " + rubric->rubric_id + " (trait " + trait +
                    "); run `trates generate-questions` first");
      batches.push_back(traits::QuestionBatch::load(path));
    }
    const auto questions = traits::ordered_questions(batches);
    const auto rows = ctx.data.essays_with_trait(trait);
    traits::TraitExtractionOptions opt;
    opt.impute = ctx.cfg.imputation;
    opt.concurrency = ctx.cfg.concurrency;
    auto block = traits::extract_trait_matrix(*gw, ctx.cfg.model_id, ctx.data, rows, questions,
                                              trait, opt);
    auto meta = ctx.meta("trait-features");
    meta["trait"] = trait;
    std::string imputed;
    for (std::size_t c = 0; c < block.imputed.size(); ++c)
      imputed += (c ? "," : "") + std::to_string(block.imputed[c]);
    meta["imputed_per_column"] = imputed;
    write_matrix_tsv(ctx.trait_path(trait), block.matrix, meta);
    std::cout << trait << '\t' << block.matrix.rows() << " essays x " << block.matrix.cols()
              << " questions, " << block.imputed_total() << " imputed\n";
  }
  print_stats(*gw);
  return 0;
}

FeatureMatrix rows_by_id(const FeatureMatrix& m, const std::vector<std::string>& ids,
                         const fs::path& path) {
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < m.rows(); ++r) index[m.row_ids()[r]] = r;
  std::vector<std::size_t> pick;
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(path.string() + " has no row for essay " + id);
    pick.push_back(it->second);
  }
  return m.select_rows(pick);
}

std::vector<eval::TraitTable> load_tables(const Context& ctx, bool need_trait, bool allow_mixed) {
  auto load = [&](const fs::path& p) {
    if (!fs::exists(p))
      throw Error("missing feature file " + p.string() + "; run `trates extract-features` first");
    MatrixMeta meta;
    auto m = read_matrix_tsv(p, &meta);
    check_digest(meta, ctx, p, allow_mixed);
    return m;
  };
  const auto prompt = load(ctx.features_dir() / "prompt.tsv");
  const auto generic = load(ctx.features_dir() / "generic.tsv");
  std::vector<eval::TraitTable> out;
  for (const auto& trait : ctx.traits) {
    std::vector<std::string> ids;
    for (auto i : ctx.data.essays_with_trait(trait)) ids.push_back(ctx.data.essays()[i].essay_id);
    std::vector<FeatureMatrix> blocks;
    if (need_trait) blocks.push_back(rows_by_id(load(ctx.trait_path(trait)), ids, ctx.trait_path(trait)));
    blocks.push_back(rows_by_id(prompt, ids, ctx.features_dir() / "prompt.tsv"));
    blocks.push_back(rows_by_id(generic, ids, ctx.features_dir() / "generic.tsv"));
    std::vector<const FeatureMatrix*> ptrs;
    for (const auto& b : blocks) ptrs.push_back(&b);
    out.push_back({trait, FeatureMatrix::hconcat(ptrs)});
  }
  return out;
}

std::vector<eval::FoldPlan> make_plan(const Context& ctx) {
  const auto ids = ctx.data.prompt_ids();
  auto plan = ctx.cfg.fold_plan == "grouped" ? eval::grouped_folds(ids, ctx.cfg.fold_groups, ctx.cfg.seed)
                                             : eval::leave_one_prompt_out(ids);
  eval::validate_plan(plan, ids);
  return plan;
}

eval::RunConfig run_config(const Context& ctx, eval::FeatureSet fs) {
  eval::RunConfig rc;
  rc.feature_set = fs;
  rc.traits = ctx.traits;
  rc.model_id = ctx.cfg.model_id;
  rc.tune = ctx.cfg.tune;
  rc.fixed = ctx.cfg.fixed;
  rc.seed = ctx.cfg.seed;
  rc.grade_scaling = ctx.cfg.grade_scaling;
  return rc;
}

eval::RunManifest manifest(const Context& ctx) {
  eval::RunManifest m;
  m.dataset_name = ctx.data.name();
  m.dataset_digest = ctx.data.digest();
  m.config_digest = ctx.digest;
  m.config = ctx.cfg.to_json();
  m.extra["template_version"] = std::string(traits::kTemplateVersion);
  m.extra["optimizer"] = "adam(0.9, 0.999, 1e-8)";
  return m;
}

int cmd_evaluate(const Context& ctx, bool allow_mixed) {
  DirLock lock(ctx.cfg.output_dir);
  const auto plan = make_plan(ctx);
  bool need_trait = false, need_regression = false;
  for (const auto& r : ctx.cfg.runs) {
    if (r == "LLM-D") continue;
    need_regression = true;
    need_trait = need_trait || *eval::parse_feature_set(r) != eval::FeatureSet::kGpF;
  }
  std::vector<eval::TraitTable> tables;
  if (need_regression) tables = load_tables(ctx, need_trait, allow_mixed);

  std::vector<eval::CvReport> reports;
  ordered_json runs_json = ordered_json::object();
  for (const auto& r : ctx.cfg.runs) {
    eval::CvReport rep;
    if (r == "LLM-D") {
      auto gw = make_gateway(ctx);
      rep = eval::run_llm_direct(ctx.data, plan, ctx.traits, *gw, ctx.cfg.model_id,
                                 ctx.cfg.concurrency);
      print_stats(*gw);
    } else {
      rep = eval::run_cross_validation(ctx.data, plan, run_config(ctx, *eval::parse_feature_set(r)),
                                       tables);
    }
    ordered_json rj;
    rj["trait_average"] = rep.trait_average;
    rj["average"] = rep.overall_average();
    for (const auto& f : rep.folds) rj["folds"].push_back({{"fold_id", f.fold_id}, {"trait", f.trait}, {"qwk", f.qwk}});
    runs_json[rep.label] = rj;
    std::cout << rep.label << "\taverage QWK " << rep.overall_average() << '\n';
    reports.push_back(std::move(rep));
  }
  const auto m = manifest(ctx);
  write_file_atomic(ctx.reports_dir() / "folds.tsv", eval::fold_table(reports, m));
  write_file_atomic(ctx.reports_dir() / "summary.md", eval::summary_markdown(reports, ctx.traits, m));
  ordered_json ej;
  ej["manifest"] = m.to_json();
  ej["runs"] = runs_json;
  write_file_atomic(ctx.reports_dir() / "evaluation.json", ej.dump(2) + "\n");
  return 0;
}

int cmd_ablate(const Context& ctx, const std::vector<std::string>& names, bool allow_mixed) {
  std::vector<FeatureCategory> cats;
  for (const auto& n : names) {
    auto c = parse_feature_category(n);
    if (!c) {
      std::string valid;
      for (auto k : kAllCategories) valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
      throw UsageError("unknown category '" + n + "'; valid names: " + valid);
    }
    cats.push_back(*c);
  }
  if (cats.empty()) cats.assign(std::begin(kAllCategories), std::end(kAllCategories));

  DirLock lock(ctx.cfg.output_dir);
  const auto base_path = ctx.reports_dir() / "evaluation.json";
  if (!fs::exists(base_path))
    throw Error("missing base run " + base_path.string() + "; run `trates evaluate` with TRATES first");
  const auto ej = json::parse(read_file(base_path));
  if (!ej.contains("runs") || !ej["runs"].contains("TRATES"))
    throw Error("missing base run: " + base_path.string() + " has no TRATES results");
  const std::string base_digest = ej["manifest"].value("config_digest", "");
  if (base_digest != ctx.digest && !allow_mixed)
    throw Error("base run was produced under config digest '" + base_digest +
                "'; re-run `trates evaluate` or pass --allow-mixed");
  eval::CvReport base;
  base.label = "TRATES";
  base.trait_average = ej["runs"]["TRATES"]["trait_average"].get<std::map<std::string, double>>();

  const auto plan = make_plan(ctx);
  const auto tables = load_tables(ctx, true, allow_mixed);
  const auto rc = run_config(ctx, eval::FeatureSet::kTrates);
  std::vector<eval::AblationRow> rows;
  for (auto c : cats) {
    rows.push_back(eval::ablate(ctx.data, plan, rc, tables, base, c));
    std::cout << to_string(c) << "\taverage drop " << rows.back().average_drop << '\n';
  }
  write_file_atomic(ctx.reports_dir() / "ablation.tsv",
                    eval::ablation_table(rows, ctx.traits, manifest(ctx)));
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Trait-based cross-prompt essay scoring"};
  app.require_subcommand(1);

  std::string config_path;
  std::string model_id, output_dir, traits_arg, runs_arg, feature_set, tuning_mode, backend,
      categories;
  std::optional<std::uint64_t> seed;
  bool force = false, allow_mixed = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--model-id", model_id, "Override model_id");
    sub->add_option("--output-dir", output_dir, "Override output_dir");
    sub->add_option("--traits", traits_arg, "Comma-separated traits");
    sub->add_option("--seed", seed, "Override seed");
    sub->add_option("--backend", backend, "openai | mock");
  };

  auto* gen = app.add_subcommand("generate-questions", "Generate assessment questions per rubric");
  add_common(gen);
  gen->add_flag("--force", force, "Regenerate existing batches (old files are archived)");

  auto* ext = app.add_subcommand("extract-features", "Write trait, prompt and generic feature files");
  add_common(ext);

  auto* ev = app.add_subcommand("evaluate", "Cross-validate and write reports");
  add_common(ev);
  ev->add_option("--runs", runs_arg, "Comma-separated runs: TRATES, LLM-F, GP-F, LLM-D");
  ev->add_option("--feature-set", feature_set, "Single run (TRATES, LLM-F, GP-F)");
  ev->add_option("--tuning", tuning_mode, "tune | fixed");
  ev->add_flag("--allow-mixed", allow_mixed, "Accept artifacts from a different config digest");

  auto* ab = app.add_subcommand("ablate", "Drop one feature category at a time");
  add_common(ab);
  ab->add_option("--categories", categories, "Comma-separated categories (default: all)");
  ab->add_option("--tuning", tuning_mode, "tune | fixed");
  ab->add_flag("--allow-mixed", allow_mixed, "Accept artifacts from a different config digest");

  auto* reg = app.add_subcommand("registry", "Feature registry");
  auto* reg_export = reg->add_subcommand("export", "Print the generic feature registry as TSV");
  std::string reg_out;
  reg_export->add_option("-o,--out", reg_out, "Write to a file instead of stdout");
  reg->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (reg->parsed()) {
      const auto table = text::registry_table();
      if (reg_out.empty()) std::cout << table;
      else write_file_atomic(reg_out, table);
      return 0;
    }
    auto cfg = ExperimentConfig::load(config_path);
    if (!model_id.empty()) cfg.model_id = model_id;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (!traits_arg.empty()) cfg.traits = split_list(traits_arg);
    if (seed) cfg.seed = *seed;
    if (!backend.empty()) cfg.backend = backend;
    if (!runs_arg.empty()) cfg.runs = split_list(runs_arg);
    if (!feature_set.empty()) cfg.runs = {feature_set};
    if (!tuning_mode.empty()) {
      if (tuning_mode != "tune" && tuning_mode != "fixed")
        throw UsageError("--tuning must be tune or fixed");
      cfg.tune = tuning_mode == "tune";
    }
    for (auto& r : cfg.runs) {
      if (auto f = eval::parse_feature_set(r)) r = std::string(eval::to_string(*f));
      else if (r == "llm-d" || r == "LLM_D" || r == "llm_d") r = "LLM-D";
      else if (!runs_arg.empty() || !feature_set.empty())
        throw UsageError("unknown run '" + r + "'; valid names: TRATES, LLM-F, GP-F, LLM-D");
    }
    const auto ctx = load_context(std::move(cfg));
    if (gen->parsed()) return cmd_generate_questions(ctx, force);
    if (ext->parsed()) return cmd_extract_features(ctx);
    if (ev->parsed()) return cmd_evaluate(ctx, allow_mixed);
    if (ab->parsed()) return cmd_ablate(ctx, split_list(categories), allow_mixed);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!e.raw().empty()) std::cerr << "raw response:\n" << e.raw().substr(0, 2000) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace trates::cli
