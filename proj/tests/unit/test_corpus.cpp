#include <gtest/gtest.h>

#include <fstream>

#include "json.hpp"
#include "synthetic.hpp"
#include "trates/common/error.hpp"
#include "trates/corpus/loaders.hpp"
#include "trates/corpus/metadata.hpp"
#include "trates/corpus/prompt_features.hpp"
#include "trates/corpus/text_normalize.hpp"

namespace fs = std::filesystem;
using namespace trates;
namespace tt = trates::testing;
using trates::testing::scratch_dir;

namespace {

void write(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

nlohmann::ordered_json two_prompt_meta() {
  return nlohmann::ordered_json::parse(R"({
    "schema": "trates-metadata", "version": 1, "dataset": "mini",
    "prompts": [
      {"prompt_id": "1", "task_description": "Write a letter.", "essay_type": "persuasive",
       "expected_length": 350, "grade_level": 8,
       "score_ranges": {"content": {"min": 1, "max": 6, "step": 1}}},
      {"prompt_id": "3", "task_description": "Read the story.", "essay_type": "source_dependent",
       "expected_length": 100, "source_length": 900, "grade_level": 10,
       "score_ranges": {"content": {"min": 0, "max": 3, "step": 1}}}
    ],
    "rubrics": [
      {"rubric_id": "cnt-a", "trait": "content", "body": "Content rubric A.", "prompt_ids": ["1"]},
      {"rubric_id": "cnt-b", "trait": "content", "body": "Content rubric B.", "prompt_ids": ["3"]}
    ]})");
}

std::string expect_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ValidationError";
  return {};
}

}  // namespace

TEST(Loaders, AsapLoadsAndResolvesRubrics) {
  const auto dir = scratch_dir("asap-ok");
  write(dir / "m.json", two_prompt_meta().dump());
  write(dir / "d.tsv",
        "essay_id\tessay_set\tessay\tcontent\n"
        "10\t1\tDear editor, computers help.\t4\n"
        "11\t3\tThe cyclist was tired.\t2\n"
        "12\t3\tShort answer without score.\t\n");
  const auto d = corpus::load_asap(dir / "d.tsv", dir / "m.json");
  ASSERT_EQ(d.essays().size(), 3u);
  EXPECT_EQ(d.essays_with_trait("content").size(), 2u);  // missing score only hides the row
  EXPECT_EQ(d.rubric_for("content", "3").rubric_id, "cnt-b");
  EXPECT_EQ(d.prompt("3").essay_type, corpus::EssayType::kSourceDependent);
  EXPECT_EQ(d.grade_levels(), (std::vector<int>{8, 10}));
  EXPECT_EQ(d.digest(), corpus::load_asap(dir / "d.tsv", dir / "m.json").digest());
}

TEST(Loaders, RowErrorsNameTheRow) {
  const auto dir = scratch_dir("asap-bad");
  write(dir / "m.json", two_prompt_meta().dump());
  write(dir / "empty.tsv", "essay_id\tessay_set\tessay\tcontent\n10\t1\tfine\t3\n11\t1\t   \t3\n");
  EXPECT_NE(expect_error([&] { corpus::load_asap(dir / "empty.tsv", dir / "m.json"); }).find("row 3: empty essay text"),
            std::string::npos);
  write(dir / "range.tsv", "essay_id\tessay_set\tessay\tcontent\n10\t3\ttext\t5\n");
  EXPECT_NE(expect_error([&] { corpus::load_asap(dir / "range.tsv", dir / "m.json"); }).find("row 2"),
            std::string::npos);
  write(dir / "prompt.tsv", "essay_id\tessay_set\tessay\tcontent\n10\t9\ttext\t1\n");
  EXPECT_NE(expect_error([&] { corpus::load_asap(dir / "prompt.tsv", dir / "m.json"); }).find("unknown prompt_id '9'"),
            std::string::npos);
  write(dir / "header.tsv", "essay_id\tessay\tcontent\n10\ttext\t1\n");
  EXPECT_NE(expect_error([&] { corpus::load_asap(dir / "header.tsv", dir / "m.json"); }).find("essay_set"),
            std::string::npos);
  EXPECT_NE(expect_error([&] { corpus::load_asap(dir / "missing.tsv", dir / "m.json"); }).find("cannot read"),
            std::string::npos);
}

TEST(Loaders, ManifestCountsAreChecked) {
  const auto dir = scratch_dir("asap-manifest");
  auto meta = two_prompt_meta();
  meta["expected_essay_count"] = 5;
  write(dir / "m.json", meta.dump());
  write(dir / "d.tsv", "essay_id\tessay_set\tessay\tcontent\n10\t1\ttext\t3\n");
  EXPECT_NE(expect_error([&] { corpus::load_asap(dir / "d.tsv", dir / "m.json"); }).find("expects 5"),
            std::string::npos);
}

TEST(Loaders, EllipseHalfGrid) {
  const auto dir = scratch_dir("ellipse");
  auto meta = nlohmann::ordered_json::parse(R"({
    "schema": "trates-metadata", "version": 1, "dataset": "ellipse-mini",
    "prompts": [
      {"prompt_id": "Phones", "task_description": "Phones at school?", "essay_type": "persuasive",
       "expected_length": 400, "grade_level": 9,
       "score_ranges": {"cohesion": {"min": 1, "max": 5, "step": 0.5}}}],
    "rubrics": [{"rubric_id": "coh", "trait": "cohesion", "body": "Cohesion rubric.", "prompt_ids": ["Phones"]}]})");
  write(dir / "m.json", meta.dump());
  write(dir / "ok.csv", "text_id,prompt,full_text,cohesion\nA1,Phones,\"I think, \"\"phones\"\"\nare fine.\",3.5\n");
  const auto d = corpus::load_ellipse(dir / "ok.csv", dir / "m.json");
  ASSERT_EQ(d.essays().size(), 1u);
  EXPECT_EQ(d.essays()[0].text, "I think, \"phones\"\nare fine.");
  EXPECT_DOUBLE_EQ(d.essays()[0].trait_scores.at("cohesion"), 3.5);
  write(dir / "bad.csv", "text_id,prompt,full_text,cohesion\nA1,Phones,text,3.25\n");
  EXPECT_NE(expect_error([&] { corpus::load_ellipse(dir / "bad.csv", dir / "m.json"); }).find("0.5 grid"),
            std::string::npos);
}

TEST(Loaders, CsvQuoting) {
  const auto recs = corpus::parse_csv("a,b\n\"x,1\",\"he said \"\"hi\"\"\"\r\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[1][0], "x,1");
  EXPECT_EQ(recs[1][1], "he said \"hi\"");
  EXPECT_THROW(corpus::parse_csv("a\n\"open"), ValidationError);
}

TEST(Metadata, RejectsBadDocuments) {
  EXPECT_THROW(corpus::parse_metadata("{", "."), ValidationError);
  EXPECT_THROW(corpus::parse_metadata(R"({"schema":"other","version":1})", "."), ValidationError);
  auto m = two_prompt_meta();
  m["prompts"][0]["essay_type"] = "poem";
  EXPECT_THROW(corpus::parse_metadata(m.dump(), "."), ValidationError);
}

TEST(Dataset, InvariantsAreEnforced) {
  auto meta = corpus::parse_metadata(two_prompt_meta().dump(), ".");
  auto bad = meta.prompts;
  bad[0].grade_level = 13;
  EXPECT_THROW(corpus::Dataset("x", bad, meta.rubrics, {}), ValidationError);
  bad = meta.prompts;
  bad[0].score_ranges["content"] = {6, 1, 1};
  EXPECT_THROW(corpus::Dataset("x", bad, meta.rubrics, {}), ValidationError);
  auto rubrics = meta.rubrics;
  rubrics[1].prompt_ids = {"1"};  // two rubrics for (content, 1), none for prompt 3
  EXPECT_THROW(corpus::Dataset("x", meta.prompts, rubrics, {}), ValidationError);
}

TEST(TextNormalize, NfcAndLineEndings) {
  EXPECT_EQ(corpus::normalize_text("cafe\xCC\x81\r\nnext\rline"), "caf\xC3\xA9\nnext\nline");
  EXPECT_THROW(corpus::normalize_text("bad \xC3"), ValidationError);
  EXPECT_FALSE(corpus::has_content(" \t\n"));
}

TEST(PromptFeatures, FourColumnsFromSpec) {
  corpus::PromptSpec p;
  p.essay_type = corpus::EssayType::kNarrative;
  p.expected_length = 300;
  p.source_length = 0;
  p.grade_level = 7;
  const auto v = corpus::prompt_feature_vector(p);
  EXPECT_EQ(v[1], 300);
  EXPECT_EQ(v[2], 0);
  EXPECT_EQ(v[3], 7);
  corpus::PromptSpec q = p;
  q.essay_type = corpus::EssayType::kPersuasive;
  EXPECT_NE(corpus::prompt_feature_vector(q)[0], v[0]);
}
