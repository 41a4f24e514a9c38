#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "synthetic.hpp"
#include "trates/eval/evaluation.hpp"
#include "trates/gateway/gateway.hpp"
#include "trates/traits/traits.hpp"

namespace trates::testing {

struct MockPipeline {
  std::unique_ptr<gateway::Gateway> gateway;
  std::vector<traits::AssessmentQuestion> questions;
  traits::TraitBlock trait_block;
  eval::TraitTable table;  // trait + prompt + generic columns
};

/// Gateway over the mock backend with the corpus' planted attributes.
std::unique_ptr<gateway::Gateway> mock_gateway(const SyntheticCorpus& c, std::uint64_t mock_seed,
                                               const std::filesystem::path& cache_dir);

/// Question generation, trait extraction and the generic/prompt blocks for
/// every essay of the synthetic corpus.
MockPipeline run_mock_pipeline(const SyntheticCorpus& c, const SyntheticSpec& spec,
                               const std::filesystem::path& cache_dir);

}  // namespace trates::testing
