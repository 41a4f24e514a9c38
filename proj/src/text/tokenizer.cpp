#include "trates/text/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace trates::text {

namespace {

// Decodes the code point starting at s[i]; `len` receives its byte length.
// Malformed bytes decode as themselves with length 1.
char32_t decode(std::string_view s, std::size_t i, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  std::size_t n = (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 1;
  if (i + n > s.size()) n = 1;
  if (n == 1) {
    len = 1;
    return b0;
  }
  char32_t cp = b0 & (0xFF >> (n + 1));
  for (std::size_t k = 1; k < n; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  len = n;
  return cp;
}

bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 ||
         c == 0x2028 || c == 0x2029;
}

bool is_unicode_punct(char32_t c) {
  switch (c) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D: case 0x2013: case 0x2014:
    case 0x2026: case 0x00AB: case 0x00BB: case 0x00BF: case 0x00A1:
      return true;
    default:
      return false;
  }
}

bool is_ascii_punct(char32_t c) {
  return c < 0x80 && std::ispunct(static_cast<int>(c)) && c != '@' && c != '_';
}

bool is_word_cp(char32_t c) {
  if (is_space(c)) return false;
  if (c < 0x80) return std::isalnum(static_cast<int>(c)) || c == '@' || c == '_';
  return !is_unicode_punct(c);
}

bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }
bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }
bool is_alpha(char32_t c) { return (c < 0x80 && std::isalpha(static_cast<int>(c))) || c >= 0x80; }
bool is_lower(char32_t c) { return c < 0x80 && std::islower(static_cast<int>(c)); }
bool is_upper(char32_t c) { return c < 0x80 && std::isupper(static_cast<int>(c)); }

constexpr std::array<std::string_view, 20> kTitles = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.", "gen.", "sen.",
    "rep.", "gov.", "capt.", "lt.", "col.", "sgt.", "mt.", "ft.", "rev.", "hon."};

constexpr std::array<std::string_view, 28> kOtherAbbreviations = {
    "etc.", "e.g.", "i.e.", "vs.", "a.m.", "p.m.", "u.s.", "u.k.", "inc.", "co.",
    "ltd.", "corp.", "no.", "vol.", "approx.", "dept.", "est.", "fig.", "jan.", "feb.",
    "aug.", "sept.", "oct.", "nov.", "dec.", "ave.", "blvd.", "misc."};

bool is_title(std::string_view tok) {
  const std::string low = to_lower_ascii(tok);
  return std::find(kTitles.begin(), kTitles.end(), low) != kTitles.end();
}

// "U.S", "e.g", "a.m": single letters joined by periods.
bool is_initials_run(std::string_view s) {
  if (s.empty()) return false;
  bool expect_letter = true;
  for (char c : s) {
    if (expect_letter) {
      if (!std::isalpha(static_cast<unsigned char>(c))) return false;
    } else if (c != '.') {
      return false;
    }
    expect_letter = !expect_letter;
  }
  return !expect_letter;  // ends on a letter
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  std::vector<Span> run() {
    std::size_t i = 0;
    while (i < text_.size()) {
      std::size_t len;
      const char32_t c = decode(text_, i, len);
      if (is_space(c)) {
        i += len;
        continue;
      }
      std::size_t j = i;
      while (j < text_.size()) {
        std::size_t l;
        if (is_space(decode(text_, j, l))) break;
        j += l;
      }
      split_chunk(i, j);
      i = j;
    }
    return std::move(spans_);
  }

 private:
  char32_t at(std::size_t i, std::size_t end) const {
    if (i >= end) return 0;
    std::size_t len;
    return decode(text_, i, len);
  }
  std::size_t width(std::size_t i) const {
    std::size_t len;
    decode(text_, i, len);
    return len;
  }
  // Code point that ends right before byte i.
  char32_t before(std::size_t i, std::size_t begin) const {
    if (i <= begin) return 0;
    std::size_t k = i - 1;
    while (k > begin && (static_cast<unsigned char>(text_[k]) & 0xC0) == 0x80) --k;
    std::size_t len;
    return decode(text_, k, len);
  }

  bool connector_ok(std::size_t pos, std::size_t run_begin, std::size_t end) const {
    const char32_t c = at(pos, end);
    const char32_t prev = before(pos, run_begin);
    const char32_t next = at(pos + width(pos), end);
    if (!is_word_cp(prev) || !is_word_cp(next)) return false;
    if (is_apostrophe(c)) return is_alpha(prev) && is_alpha(next);
    switch (c) {
      case '-':
      case '/':
        return true;
      case '&':
        return is_alpha(prev) && is_alpha(next);
      case ',':
      case ':':
        return is_digit(prev) && is_digit(next);
      case '.': {
        if (is_digit(prev) && is_digit(next)) return true;
        const std::string_view run = text_.substr(run_begin, pos - run_begin);
        // Initials: the run so far is letter(.letter)* and a single letter follows.
        const std::size_t next_w = width(pos + 1 <= end ? pos + 1 : pos);
        const char32_t after_next = at(pos + 1 + next_w, end);
        if (is_initials_run(run) && is_alpha(next) && (after_next == '.' || after_next == 0))
          return true;
        return is_lower(prev) && is_lower(next);
      }
      default:
        return false;
    }
  }

  void split_chunk(std::size_t b, std::size_t e) {
    std::size_t i = b;
    while (i < e) {
      const char32_t c = at(i, e);
      if (is_word_cp(c)) {
        std::size_t j = i + width(i);
        while (j < e) {
          const char32_t d = at(j, e);
          if (is_word_cp(d)) {
            j += width(j);
          } else if ((d == '-' || d == '/' || d == '&' || d == ',' || d == ':' || d == '.' ||
                      is_apostrophe(d)) &&
                     connector_ok(j, i, e)) {
            j += width(j);
          } else {
            break;
          }
        }
        if (j < e && text_[j] == '.') {
          const std::string with_period = std::string(text_.substr(i, j - i + 1));
          const std::string_view bare = text_.substr(i, j - i);
          if (is_abbreviation(with_period) ||
              (is_initials_run(bare) && bare.size() >= 3) ||
              (bare.size() == 1 && is_upper(static_cast<unsigned char>(bare[0])) &&
               bare[0] != 'I' && bare[0] != 'A'))
            ++j;
        }
        emit_word(i, j);
        i = j;
        continue;
      }
      // Punctuation.
      if (text_[i] == '.' || text_[i] == '-') {
        std::size_t j = i;
        while (j < e && text_[j] == text_[i]) ++j;
        if (j - i >= 2 && (text_[i] == '-' || j - i >= 3)) {
          spans_.push_back({i, j});
          i = j;
          continue;
        }
      }
      const std::size_t w = width(i);
      spans_.push_back({i, i + w});
      i += w;
    }
  }

  void emit_word(std::size_t b, std::size_t e) {
    const std::string_view w = text_.substr(b, e - b);
    const std::string low = to_lower_ascii(w);
    if (low == "cannot") {
      spans_.push_back({b, b + 3});
      spans_.push_back({b + 3, e});
      return;
    }
    // n't (ASCII or typographic apostrophe)
    for (std::string_view neg : {std::string_view("n't"), std::string_view("n\xE2\x80\x99t")}) {
      if (low.size() > neg.size() && low.ends_with(neg)) {
        spans_.push_back({b, e - neg.size()});
        spans_.push_back({e - neg.size(), e});
        return;
      }
    }
    for (std::string_view clitic : {"s", "re", "ve", "ll", "d", "m"}) {
      for (std::string_view apos : {std::string_view("'"), std::string_view("\xE2\x80\x99")}) {
        const std::size_t n = apos.size() + clitic.size();
        if (low.size() > n && std::string_view(low).substr(low.size() - n, apos.size()) == apos &&
            std::string_view(low).substr(low.size() - clitic.size()) == clitic) {
          spans_.push_back({b, e - n});
          spans_.push_back({e - n, e});
          return;
        }
      }
    }
    spans_.push_back({b, e});
  }

  std::string_view text_;
  std::vector<Span> spans_;
};

bool is_closing(std::string_view t) {
  return t == "\"" || t == "'" || t == ")" || t == "]" || t == "}" || t == "\xE2\x80\x9D" ||
         t == "\xE2\x80\x99" || t == "\xC2\xBB";
}

bool is_terminal(std::string_view t) { return t == "." || t == "!" || t == "?"; }
bool is_ellipsis(std::string_view t) {
  return t == "\xE2\x80\xA6" || (t.size() >= 3 && t.find_first_not_of('.') == std::string_view::npos);
}

bool starts_upper(std::string_view t) {
  return !t.empty() && std::isupper(static_cast<unsigned char>(t[0]));
}

bool blank_line_between(std::string_view text, std::size_t from, std::size_t to) {
  int newlines = 0;
  for (std::size_t i = from; i < to; ++i) {
    if (text[i] == '\n') {
      if (++newlines >= 2) return true;
    } else if (!(text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) {
      newlines = 0;
    }
  }
  return false;
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_abbreviation(std::string_view tok) {
  if (tok.empty() || tok.back() != '.') return false;
  const std::string low = to_lower_ascii(tok);
  return std::find(kTitles.begin(), kTitles.end(), low) != kTitles.end() ||
         std::find(kOtherAbbreviations.begin(), kOtherAbbreviations.end(), low) !=
             kOtherAbbreviations.end();
}

bool is_word_token(std::string_view token) {
  for (std::size_t i = 0; i < token.size();) {
    std::size_t len;
    const char32_t c = decode(token, i, len);
    if ((c < 0x80 && std::isalnum(static_cast<int>(c))) || (c >= 0x80 && !is_unicode_punct(c)))
      return true;
    i += len;
  }
  return false;
}

bool is_punct_token(std::string_view token) {
  if (token.empty()) return false;
  for (std::size_t i = 0; i < token.size();) {
    std::size_t len;
    const char32_t c = decode(token, i, len);
    if (!(is_ascii_punct(c) || is_unicode_punct(c))) return false;
    i += len;
  }
  return true;
}

std::size_t TokenizedEssay::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

TokenizedEssay tokenize(std::string_view text) {
  const std::vector<Span> spans = Scanner(text).run();
  TokenizedEssay out;
  Sentence current;
  auto close = [&] {
    if (!current.empty()) out.sentences.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const Span sp = spans[k];
    if (!current.empty() && blank_line_between(text, current.back().end, sp.begin)) close();
    current.push_back({std::string(text.substr(sp.begin, sp.end - sp.begin)), sp.begin, sp.end});
    const std::string_view tok = current.back().text;
    const bool has_next = k + 1 < spans.size();
    const std::string_view next =
        has_next ? text.substr(spans[k + 1].begin, spans[k + 1].end - spans[k + 1].begin) : "";

    bool ends = false;
    if (is_terminal(tok)) {
      ends = true;
    } else if (is_ellipsis(tok)) {
      ends = !has_next || starts_upper(next);
    } else if (tok.size() > 1 && tok.back() == '.' && is_word_token(tok)) {
      // Abbreviation or initial: titles bind to the following name.
      const bool initial = tok.size() == 2 && starts_upper(tok);
      ends = !has_next || (!is_title(tok) && !initial && starts_upper(next));
    }
    if (!ends) continue;
    // Absorb further terminals and attached closing punctuation.
    while (k + 1 < spans.size()) {
      const Span nx = spans[k + 1];
      const std::string_view nt = text.substr(nx.begin, nx.end - nx.begin);
      const bool attached = nx.begin == current.back().end;
      if (is_terminal(nt) || (attached && is_closing(nt))) {
        current.push_back({std::string(nt), nx.begin, nx.end});
        ++k;
      } else {
        break;
      }
    }
    close();
  }
  close();
  return out;
}

}  // namespace trates::text
