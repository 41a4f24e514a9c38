#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace trates::text {

/// Word lists shipped under assets/ (formats documented in assets/README.md).
struct Lexicons {
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> dictionary;       // spelling
  std::unordered_set<std::string> dale_chall_easy;  // familiar-word list
  std::unordered_map<std::string, double> polarity;  // sentiment, [-1, 1]

  static Lexicons load(const std::filesystem::path& asset_dir);
  /// Loaded once from asset_dir() and shared.
  static const Lexicons& shared();
};

/// Asset directory: $TRATES_ASSETS when set, else the build-time default.
std::filesystem::path asset_dir();

}  // namespace trates::text
