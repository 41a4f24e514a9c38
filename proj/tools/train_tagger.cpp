// Trains or evaluates the averaged-perceptron POS tagger.
// Tagged files hold one sentence per line, tokens as word/TAG separated by
// spaces (the last '/' splits word from tag).
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "trates/text/pos_tagger.hpp"

namespace {

std::vector<trates::text::TaggedSentence> read_tagged(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<trates::text::TaggedSentence> data;
  std::string line, item;
  while (std::getline(in, line)) {
    trates::text::TaggedSentence s;
    std::istringstream ss(line);
    while (ss >> item) {
      const auto slash = item.rfind('/');
      if (slash == std::string::npos || slash == 0) continue;
      s.words.push_back(item.substr(0, slash));
      s.tags.push_back(item.substr(slash + 1));
    }
    if (!s.words.empty()) data.push_back(std::move(s));
  }
  return data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train or evaluate the perceptron POS tagger"};
  app.require_subcommand(1);

  std::string input, weights;
  int iterations = 5;
  std::uint64_t seed = 1;
  double prune = 0.0;
  auto* train = app.add_subcommand("train", "train weights from a tagged file");
  train->add_option("input", input, "word/TAG training file")->required();
  train->add_option("weights", weights, "weights file to write")->required();
  train->add_option("-i,--iterations", iterations);
  train->add_option("--seed", seed);
  train->add_option("--prune", prune, "drop weights with |w| below this");

  bool verbose = false;
  auto* eval = app.add_subcommand("eval", "report token accuracy on a tagged file");
  eval->add_option("weights", weights)->required();
  eval->add_option("input", input)->required();
  eval->add_flag("-v,--verbose", verbose, "print mistakes");
  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      auto data = read_tagged(input);
      std::cerr << "training on " << data.size() << " sentences\n";
      const auto model = trates::text::PerceptronTagger::train(std::move(data), iterations, seed);
      model.save(weights, prune);
      std::cerr << "features: " << model.feature_count() << ", classes: " << model.classes().size()
                << '\n';
      return 0;
    }
    const auto model = trates::text::PerceptronTagger::load(weights);
    std::size_t total = 0, correct = 0;
    for (const auto& s : read_tagged(input)) {
      const auto tags = model.tag(s.words);
      for (std::size_t i = 0; i < tags.size(); ++i, ++total) {
        if (tags[i] == s.tags[i]) {
          ++correct;
        } else if (verbose) {
          std::cout << s.words[i] << '\t' << s.tags[i] << '\t' << tags[i] << '\n';
        }
      }
    }
    std::cout << "accuracy " << correct << '/' << total << " = "
              << static_cast<double>(correct) / static_cast<double>(total) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
