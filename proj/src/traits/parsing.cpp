#include <cctype>
#include <cmath>
#include <regex>
#include <set>

#include "trates/traits/traits.hpp"

namespace trates::traits {

namespace {

struct Token {
  std::string lower;
  std::size_t begin;
  std::size_t end;
};

bool word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

std::vector<Token> word_tokens(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    Token t{{}, i, i};
    while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) {
      t.lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
      ++i;
    }
    t.end = i;
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<Rating> level_of(const std::string& w) {
  if (w == "high") return Rating::kHigh;
  if (w == "medium") return Rating::kMedium;
  if (w == "low") return Rating::kLow;
  return std::nullopt;
}

// Characters that may join the members of an option list. A newline or a
// closing bracket ends the list.
bool list_gap(std::string_view gap) {
  for (char c : gap)
    if (c == '\n' || (!std::isspace(static_cast<unsigned char>(c)) && c != ',' && c != '/' &&
                      c != '|' && c != '(' && c != '['))
      return false;
  return true;
}

}  // namespace

Rating rating_from_numeric(int v) {
  if (v < 1 || v > 3) throw ValidationError("rating value out of range: " + std::to_string(v));
  return static_cast<Rating>(v);
}

std::string_view to_string(Rating r) {
  switch (r) {
    case Rating::kHigh: return "High";
    case Rating::kMedium: return "Medium";
    case Rating::kLow: return "Low";
  }
  return "?";
}

Rating parse_rating(std::string_view text) {
  const auto toks = word_tokens(text);
  std::size_t i = 0;
  while (i < toks.size()) {
    const auto first = level_of(toks[i].lower);
    if (!first) {
      ++i;
      continue;
    }
    // Extend over "high, medium, or low"-style runs.
    std::set<Rating> levels{*first};
    std::size_t last = i;
    std::size_t j = i + 1;
    while (j < toks.size()) {
      std::size_t k = j;
      auto gap_ok = [&](std::size_t a, std::size_t b) {
        return list_gap(text.substr(toks[a].end, toks[b].begin - toks[a].end));
      };
      if (!gap_ok(last, k)) break;
      if (toks[k].lower == "or" || toks[k].lower == "and") {
        if (k + 1 >= toks.size() || !gap_ok(k, k + 1)) break;
        ++k;
      }
      const auto lvl = level_of(toks[k].lower);
      if (!lvl) break;
      levels.insert(*lvl);
      last = k;
      j = k + 1;
    }
    if (levels.size() == 1) return *first;
    if (levels.size() == 2)
      throw ParseError("ambiguous rating: two levels named together", std::string(text));
    i = last + 1;  // echoed option list
  }
  throw ParseError("no high/medium/low rating found", std::string(text));
}

std::vector<std::string> parse_question_list(std::string_view text) {
  static const std::regex line_re(R"(^\s*(?:[*#]+\s*)?(\d+)\s*(?:\*\*)?\s*[-.):]\s*(?:\*\*)?\s*(.*?)\s*$)");
  std::vector<std::string> out;
  std::set<long> seen;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    std::string body = m[2].str();
    while (body.size() >= 2 && body.compare(body.size() - 2, 2, "**") == 0)
      body.erase(body.size() - 2);
    if (body.empty()) continue;
    const long n = std::stol(m[1].str());
    if (!seen.insert(n).second)
      throw ParseError("duplicate question number " + std::to_string(n), std::string(text));
    out.push_back(std::move(body));
  }
  if (out.empty()) throw ParseError("unparseable question list", std::string(text));
  return out;
}

double parse_direct_score(std::string_view text, const corpus::ScoreRange& range) {
  static const std::regex num_re(R"((\d+(?:\.\d+)?))");
  const std::string str(text);
  std::smatch m;
  if (!std::regex_search(str, m, num_re)) throw ParseError("no score found", str);
  double v = std::stod(m[1].str());
  const auto at = static_cast<std::size_t>(m.position(1));
  if (at > 0 && str[at - 1] == '-' &&
      (at < 2 || !std::isalnum(static_cast<unsigned char>(str[at - 2]))))
    v = -v;
  const double steps = std::round((range.max - range.min) / range.step);
  const double idx = std::clamp(std::round((v - range.min) / range.step), 0.0, steps);
  return range.min + idx * range.step;
}

}  // namespace trates::traits
