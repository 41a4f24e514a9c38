#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>

#include "trates/corpus/types.hpp"

namespace trates::testing {

/// Two-prompt corpus whose "organization" score is a noiseless monotone
/// function of the mock backend's planted ratings. Both prompts share one
/// rubric, so any fold sees the questions that drive the target score.
struct SyntheticSpec {
  std::uint64_t seed = 7;
  std::uint64_t mock_seed = 11;
  int essays_per_prompt = 120;
  int questions = 5;
};

struct SyntheticCorpus {
  std::filesystem::path dir;
  std::filesystem::path data;      // ASAP-style TSV
  std::filesystem::path metadata;  // trates-metadata JSON
  std::filesystem::path planted;   // essay_id \t attribute
  corpus::Dataset dataset;
  std::unordered_map<std::string, double> attribute;
};

inline constexpr const char* kSyntheticTrait = "organization";
inline constexpr const char* kSyntheticRubric = "R-org";

SyntheticCorpus write_synthetic_corpus(const std::filesystem::path& dir,
                                       const SyntheticSpec& spec = {});

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace trates::testing
