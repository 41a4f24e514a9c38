#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using trates::testing::scratch_dir;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TRATES_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = scratch_dir(std::string("cli-") + info->name());
    corpus_ = trates::testing::write_synthetic_corpus(dir_ / "corpus", {.essays_per_prompt = 25});
    nlohmann::ordered_json cfg = {
        {"dataset", {{"format", "asap"}, {"data", "corpus/essays.tsv"}, {"metadata", "corpus/metadata.json"}}},
        {"model_id", "mock-model"},
        {"gateway", {{"backend", "mock"}, {"mock", {{"seed", 11}, {"planted", "corpus/planted.tsv"}}}}},
        {"traits", {"organization"}},
        {"runs", {"TRATES", "GP-F"}},
        {"tuning", {{"mode", "fixed"}, {"fixed", {{"max_epochs", 40}, {"learning_rate", 0.01}}}}},
        {"output_dir", "out"}};
    std::ofstream(dir_ / "config.json") << cfg.dump(2);
    config_ = "-c " + (dir_ / "config.json").string();
  }
  fs::path out() const { return dir_ / "out"; }

  fs::path dir_;
  std::string config_;
  trates::testing::SyntheticCorpus corpus_;
};

}  // namespace

TEST_F(Cli, FullPipelineAndIdempotentReruns) {
  auto r = run_cli("generate-questions " + config_);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("1 backend calls"), std::string::npos) << r.output;
  const auto batch = out() / "questions" / "mock-model" / "R-org.json";
  ASSERT_TRUE(fs::exists(batch));

  r = run_cli("generate-questions " + config_);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("kept 1 existing"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("0 backend calls"), std::string::npos) << r.output;

  r = run_cli("extract-features " + config_);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("250 backend calls"), std::string::npos) << r.output;  // 50 essays x 5
  const auto trait_file = out() / "features" / "mock-model" / "trait_organization.tsv";
  const auto before = slurp(trait_file);
  r = run_cli("extract-features " + config_);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("0 backend calls"), std::string::npos) << r.output;
  EXPECT_EQ(slurp(trait_file), before);

  r = run_cli("evaluate " + config_);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output.find("gateway:"), std::string::npos) << "TRATES/GP-F should not call the LLM";
  const auto summary = slurp(out() / "reports" / "summary.md");
  EXPECT_NE(summary.find("| Model | organization | AVG |"), std::string::npos) << summary;
  EXPECT_TRUE(fs::exists(out() / "reports" / "folds.tsv"));
  EXPECT_TRUE(fs::exists(out() / "reports" / "evaluation.json"));
  r = run_cli("evaluate " + config_);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(out() / "reports" / "summary.md"), summary);

  r = run_cli("ablate " + config_ + " --categories trait-specific,sentiment");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out() / "reports" / "ablation.tsv"));
}

TEST_F(Cli, ForceArchivesTheOldBatch) {
  ASSERT_EQ(run_cli("generate-questions " + config_).code, 0);
  const auto r = run_cli("generate-questions --force " + config_);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out() / "questions" / "mock-model" / "archive" / "R-org.1.json"));
  EXPECT_NE(r.output.find("1 backend calls"), std::string::npos) << r.output;
}

TEST_F(Cli, GpfNeedsNoQuestionsOrEndpoint) {
  ASSERT_EQ(run_cli("generate-questions " + config_).code, 0);
  ASSERT_EQ(run_cli("extract-features " + config_).code, 0);
  // No endpoint is configured, so building an HTTP gateway would fail. The
  // backend is part of the config digest, hence --allow-mixed.
  ::unsetenv("TRATES_LLM_BASE_URL");
  const auto r = run_cli("evaluate " + config_ + " --feature-set GP-F --backend openai --allow-mixed");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output.find("gateway:"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  auto r = run_cli("ablate " + config_ + " --categories nonsense");
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_NE(r.output.find("trait-specific"), std::string::npos) << r.output;
  EXPECT_EQ(run_cli("evaluate").code, 2);
  EXPECT_EQ(run_cli("no-such-command").code, 2);
  r = run_cli("evaluate " + config_ + " --runs NOPE");
  EXPECT_EQ(r.code, 2) << r.output;
}

TEST_F(Cli, MissingArtifactsAndLocksAreErrors) {
  auto r = run_cli("extract-features " + config_);
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("generate-questions"), std::string::npos) << r.output;
  fs::create_directories(out());
  std::ofstream(out() / ".trates.lock") << "held";
  r = run_cli("generate-questions " + config_);
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("lock"), std::string::npos) << r.output;
}

TEST_F(Cli, DigestMismatchNeedsAllowMixed) {
  ASSERT_EQ(run_cli("generate-questions " + config_).code, 0);
  ASSERT_EQ(run_cli("extract-features " + config_).code, 0);
  auto r = run_cli("evaluate " + config_ + " --model-id other-model --feature-set GP-F");
  // a different model id has no question batches or features of its own
  EXPECT_EQ(r.code, 1) << r.output;
  auto cfg = nlohmann::json::parse(slurp(dir_ / "config.json"));
  cfg["imputation"] = false;
  std::ofstream(dir_ / "config.json", std::ios::trunc) << cfg.dump(2);
  r = run_cli("evaluate " + config_ + " --feature-set GP-F");
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("--allow-mixed"), std::string::npos) << r.output;
  r = run_cli("evaluate " + config_ + " --feature-set GP-F --allow-mixed");
  EXPECT_EQ(r.code, 0) << r.output;
}

TEST(CliRegistry, ExportsTheRegistry) {
  const auto r = run_cli("registry export");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("flesch_reading_ease"), std::string::npos);
  EXPECT_NE(r.output.find("overall_negativity_score"), std::string::npos);
}
