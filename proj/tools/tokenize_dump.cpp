// Reads text lines from stdin and writes one tokenized sentence per line,
// tokens separated by single spaces. Used to build tagger training data.
#include <iostream>
#include <string>

#include "trates/text/tokenizer.hpp"

int main() {
  std::string line;
  while (std::getline(std::cin, line)) {
    for (const auto& sentence : trates::text::tokenize(line).sentences) {
      bool first = true;
      for (const auto& tok : sentence) {
        if (!first) std::cout << ' ';
        std::cout << tok.text;
        first = false;
      }
      std::cout << '\n';
    }
  }
}
