#include "synthetic.hpp"

#include <unistd.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trates/common/rng.hpp"
#include "trates/corpus/loaders.hpp"
#include "trates/gateway/gateway.hpp"

namespace trates::testing {

namespace fs = std::filesystem;

namespace {

const char* const kWords[] = {
    "the",    "school",  "student", "teacher", "library", "computer", "people",  "friend",
    "family", "believe", "because", "important", "reason", "example", "however", "think",
    "many",   "often",   "should",  "would",   "could",   "city",     "park",    "summer",
    "learn",  "write",   "read",    "time",    "day",     "year",     "world",   "simple",
    "helpful", "problem", "answer", "question", "story",  "history",  "science", "music",
    "before", "after",   "during",  "while",   "small",   "large",    "quickly", "slowly",
    "and",    "but",     "with",    "without", "about",   "their",    "every",   "some"};

std::string random_text(Rng& rng) {
  constexpr std::size_t n_words = sizeof(kWords) / sizeof(kWords[0]);
  std::ostringstream out;
  const int sentences = 4 + static_cast<int>(rng.below(7));
  for (int s = 0; s < sentences; ++s) {
    const int len = 6 + static_cast<int>(rng.below(9));
    for (int w = 0; w < len; ++w) {
      std::string word = kWords[rng.below(n_words)];
      if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      out << word << (w + 1 == len ? (rng.below(5) == 0 ? "!" : ".") : (rng.below(8) == 0 ? "," : ""));
      out << ' ';
    }
  }
  return out.str();
}

}  // namespace

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("trates-test-" + name + "-" +
                                                std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SyntheticCorpus write_synthetic_corpus(const fs::path& dir, const SyntheticSpec& spec) {
  fs::create_directories(dir);
  SyntheticCorpus c;
  c.dir = dir;
  c.data = dir / "essays.tsv";
  c.metadata = dir / "metadata.json";
  c.planted = dir / "planted.tsv";

  gateway::MockConfig mc;
  mc.seed = spec.mock_seed;
  gateway::MockBackend mock(mc);

  struct PromptDef {
    const char* id;
    double min, max;
  };
  const PromptDef prompts[] = {{"P1", 1, 6}, {"P2", 0, 3}};

  nlohmann::ordered_json meta;
  meta["schema"] = "trates-metadata";
  meta["version"] = 1;
  meta["dataset"] = "synthetic";
  meta["prompts"] = nlohmann::ordered_json::array();
  const char* types[] = {"persuasive", "narrative"};
  int k = 0;
  for (const auto& p : prompts) {
    meta["prompts"].push_back({{"prompt_id", p.id},
                               {"task_description", std::string("Write about topic ") + p.id + "."},
                               {"essay_type", types[k++]},
                               {"expected_length", 150 + 50 * k},
                               {"grade_level", 8},
                               {"score_ranges", {{kSyntheticTrait, {{"min", p.min}, {"max", p.max}, {"step", 1}}}}}});
  }
  meta["rubrics"] = {{{"rubric_id", kSyntheticRubric},
                      {"trait", kSyntheticTrait},
                      {"body", "Score 6: clear introduction, body and conclusion with smooth transitions. "
                               "Score 1: no discernible organization."},
                      {"prompt_ids", {"P1", "P2"}}}};
  {
    std::ofstream out(c.metadata);
    out << meta.dump(2) << '\n';
  }

  Rng rng(spec.seed);
  std::ofstream data(c.data);
  std::ofstream planted(c.planted);
  data << "essay_id\tessay_set\tessay\t" << kSyntheticTrait << '\n';
  planted << "essay_id\tattribute\n";
  int id = 1000;
  for (const auto& p : prompts) {
    for (int i = 0; i < spec.essays_per_prompt; ++i) {
      const std::string essay_id = std::to_string(++id);
      const double a = rng.uniform();
      int sum = 0;
      for (int q = 1; q <= spec.questions; ++q)
        sum += mock.planted_rating(a, std::string(kSyntheticRubric) + "#" + std::to_string(q));
      const double frac = static_cast<double>(sum - spec.questions) / (2.0 * spec.questions);
      const double score = p.min + std::round(frac * (p.max - p.min));
      data << essay_id << '\t' << p.id << '\t' << random_text(rng) << '\t' << score << '\n';
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", a);
      planted << essay_id << '\t' << buf << '\n';
      c.attribute[essay_id] = a;
    }
  }
  data.close();
  planted.close();
  c.dataset = corpus::load_asap(c.data, c.metadata);
  return c;
}

}  // namespace trates::testing
